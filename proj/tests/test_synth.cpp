#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kqeeg/features.hpp"
#include "kqeeg/study.hpp"
#include "kqeeg/synth.hpp"

using namespace kqeeg;

namespace {

StudyConfig fast_config() {
    StudyConfig config = default_config();
    config.filter.order = 512;
    return config;
}

double relative_band(const Recording& rec, const std::string& channel, Band band,
                     const StudyConfig& config) {
    const auto powers = channel_band_powers(rec, config);
    return powers.at(channel).rel(band);
}

SynthSpec short_spec(std::uint64_t seed, double duration = 8.0) {
    SynthSpec spec;
    spec.duration_s = duration;
    spec.seed = seed;
    return spec;
}

} // namespace

TEST_CASE("identical specs generate identical recordings") {
    const SynthSpec spec = short_spec(99);
    const Recording a = gen_eeg(spec);
    const Recording b = gen_eeg(spec);
    CHECK((a.samples - b.samples).cwiseAbs().maxCoeff() == 0.0);

    SynthSpec other = spec;
    other.seed = 100;
    const Recording c = gen_eeg(other);
    CHECK((a.samples - c.samples).cwiseAbs().maxCoeff() > 0.0);

    // Sessions draw from distinct streams.
    const Recording post = gen_eeg(spec, "synth", Session::Post240);
    CHECK((a.samples - post.samples).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("recording shape matches the spec") {
    const Recording rec = gen_eeg(short_spec(1, 4.0));
    CHECK(rec.n_channels() == 4);
    CHECK(rec.n_samples() == 4 * 512);
    CHECK(rec.channels[0].name == "Fp1");
    CHECK(rec.channels[3].name == "AF8");
    CHECK(rec.samples.allFinite());
}

TEST_CASE("invalid specs are rejected") {
    SynthSpec bad = short_spec(1);
    bad.duration_s = 0.0;
    CHECK_THROWS_AS(gen_eeg(bad), InvalidSynthSpec);
    bad = short_spec(1);
    bad.band_amps_uv[0] = -1.0;
    CHECK_THROWS_AS(gen_eeg(bad), InvalidSynthSpec);
    bad = short_spec(1);
    bad.asymmetry_bias = 0.0;
    CHECK_THROWS_AS(gen_eeg(bad), InvalidSynthSpec);
}

TEST_CASE("theta amplitude drives measured relative theta power") {
    const StudyConfig config = fast_config();
    SynthSpec none = short_spec(5);
    none.band_amps_uv[static_cast<int>(Band::Theta)] = 0.0;
    SynthSpec strong = short_spec(5);
    strong.band_amps_uv[static_cast<int>(Band::Theta)] = 5.0;

    const double weak_theta = relative_band(gen_eeg(none), "Fp1", Band::Theta, config);
    const double strong_theta = relative_band(gen_eeg(strong), "Fp1", Band::Theta, config);
    CHECK(strong_theta > weak_theta);
}

TEST_CASE("relative band power is monotone over an amplitude grid") {
    const StudyConfig config = fast_config();
    double last = -1.0;
    for (const double amp : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        SynthSpec spec = short_spec(12);
        spec.band_amps_uv[static_cast<int>(Band::LowAlpha)] = amp;
        const double rel = relative_band(gen_eeg(spec), "AF7", Band::LowAlpha, config);
        CHECK(rel > last);
        last = rel;
    }
}

TEST_CASE("unbiased asymmetry averages near zero") {
    const StudyConfig config = fast_config();
    double total = 0.0;
    const int n_seeds = 50;
    for (int seed = 0; seed < n_seeds; ++seed) {
        const Recording rec = gen_eeg(short_spec(static_cast<std::uint64_t>(seed), 6.0));
        const auto powers = channel_band_powers(rec, config);
        const auto score =
            alpha_asymmetry(powers.at("Fp1"), powers.at("Fp2"), Band::LowAlpha);
        total += score.value;
    }
    CHECK(total / n_seeds < 0.05);
}

TEST_CASE("asymmetry bias shifts low-alpha power to the right channels") {
    const StudyConfig config = fast_config();
    SynthSpec spec = short_spec(31, 10.0);
    spec.asymmetry_bias = 1.6;
    const Recording rec = gen_eeg(spec);
    const auto powers = channel_band_powers(rec, config);
    CHECK(powers.at("Fp2").rel(Band::LowAlpha) > powers.at("Fp1").rel(Band::LowAlpha));
    CHECK(powers.at("AF8").rel(Band::LowAlpha) > powers.at("AF7").rel(Band::LowAlpha));
}

TEST_CASE("cohorts reproduce the trial arm structure") {
    CohortSpec spec;
    spec.base.duration_s = 2.0;
    spec.include_post = false;
    spec.seed = 3;
    const auto cohort = gen_cohort(spec);
    CHECK(cohort.size() == 55);

    std::map<TrialArm, int> counts, responders;
    for (const auto& subject : cohort) {
        ++counts[subject.record.group];
        if (subject.record.label == ResponseLabel::Responder) ++responders[subject.record.group];
    }
    CHECK(counts[TrialArm::A_Ket05] == 18);
    CHECK(counts[TrialArm::B_Ket02] == 19);
    CHECK(counts[TrialArm::C_Saline] == 18);
    CHECK(responders[TrialArm::A_Ket05] == 11);
    CHECK(responders[TrialArm::B_Ket02] == 5);
    CHECK(responders[TrialArm::C_Saline] == 2);
}

TEST_CASE("generated scores always reproduce the assigned labels") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CohortSpec spec;
        spec.base.duration_s = 1.0;
        spec.include_post = false;
        spec.seed = seed;
        spec.n_per_group = {{TrialArm::A_Ket05, 12}, {TrialArm::B_Ket02, 0}, {TrialArm::C_Saline, 0}};
        spec.responder_fraction[TrialArm::A_Ket05] = 0.5;
        for (const auto& subject : gen_cohort(spec)) {
            CHECK(label_responder(subject.record.hdrs, spec.responder_threshold) ==
                  subject.record.label);
            CHECK(subject.record.hdrs.has(Timepoint::D14));
        }
    }
}

TEST_CASE("zero responder fraction labels everyone a non-responder") {
    CohortSpec spec;
    spec.base.duration_s = 1.0;
    spec.include_post = false;
    spec.seed = 8;
    spec.responder_fraction = {{TrialArm::A_Ket05, 0.0},
                               {TrialArm::B_Ket02, 0.0},
                               {TrialArm::C_Saline, 0.0}};
    for (const auto& subject : gen_cohort(spec)) {
        CHECK(subject.record.label == ResponseLabel::NonResponder);
    }
}

TEST_CASE("cohort generation is a pure function of the spec") {
    CohortSpec spec;
    spec.base.duration_s = 2.0;
    spec.seed = 17;
    spec.n_per_group = {{TrialArm::A_Ket05, 4}, {TrialArm::B_Ket02, 3}, {TrialArm::C_Saline, 2}};
    const auto a = gen_cohort(spec);
    const auto b = gen_cohort(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].record.subject_id == b[i].record.subject_id);
        CHECK(a[i].record.hdrs.at(Timepoint::T240) == b[i].record.hdrs.at(Timepoint::T240));
        CHECK((a[i].baseline.samples - b[i].baseline.samples).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(a[i].post.has_value());
        CHECK((a[i].post->samples - b[i].post->samples).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("strong theta deficits are detected downstream in every seed") {
    const StudyConfig config = fast_config();
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        CohortSpec spec;
        spec.base.duration_s = 5.0;
        spec.include_post = false;
        spec.seed = seed;
        spec.theta_deficit = 0.5;
        spec.n_per_group = {{TrialArm::A_Ket05, 40}, {TrialArm::B_Ket02, 0}, {TrialArm::C_Saline, 0}};
        spec.responder_fraction[TrialArm::A_Ket05] = 0.5;

        std::vector<double> resp_theta, nonresp_theta;
        for (const auto& subject : gen_cohort(spec)) {
            const double theta =
                relative_band(subject.baseline, "Fp2", Band::Theta, config);
            (subject.record.label == ResponseLabel::Responder ? resp_theta : nonresp_theta)
                .push_back(theta);
        }
        Comparison c;
        c.feature = "rel_theta_Fp2";
        c.x = Eigen::Map<const Eigen::VectorXd>(resp_theta.data(),
                                                static_cast<Eigen::Index>(resp_theta.size()));
        c.y = Eigen::Map<const Eigen::VectorXd>(nonresp_theta.data(),
                                                static_cast<Eigen::Index>(nonresp_theta.size()));
        const auto outcomes = group_compare({c});
        REQUIRE(outcomes.size() == 1);
        CHECK(outcomes[0].reject_primary);
    }
}

TEST_CASE("empty cohorts are rejected") {
    CohortSpec spec;
    spec.n_per_group = {{TrialArm::A_Ket05, 0}, {TrialArm::B_Ket02, 0}, {TrialArm::C_Saline, 0}};
    CHECK_THROWS_AS(gen_cohort(spec), EmptyCohort);

    CohortSpec bad;
    bad.responder_fraction[TrialArm::A_Ket05] = 1.5;
    CHECK_THROWS_AS(gen_cohort(bad), InvalidSynthSpec);
}
