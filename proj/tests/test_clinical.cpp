#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "kqeeg/clinical.hpp"
#include "kqeeg/rng.hpp"

using namespace kqeeg;

namespace {

HdrsSeries series(double t0, double t240) {
    HdrsSeries s;
    s.set(Timepoint::T0, t0);
    s.set(Timepoint::T240, t240);
    return s;
}

} // namespace

TEST_CASE("percent reduction matches the reported cohort means") {
    CHECK(percent_reduction(series(22.4, 10.6), Timepoint::T240) ==
          doctest::Approx(0.527).epsilon(0.001));
    CHECK(percent_reduction(series(20, 20), Timepoint::T240) == doctest::Approx(0.0));
    CHECK(percent_reduction(series(24.8, 20.8), Timepoint::T240) ==
          doctest::Approx(0.161).epsilon(0.002));
}

TEST_CASE("missing timepoints and zero baselines are errors") {
    HdrsSeries only_baseline;
    only_baseline.set(Timepoint::T0, 20);
    CHECK_THROWS_AS(percent_reduction(only_baseline, Timepoint::T240), MissingTimepoint);

    CHECK_THROWS_AS(percent_reduction(series(0, 0), Timepoint::T240), ZeroBaseline);
    CHECK_THROWS_AS(series(20, 11).set(Timepoint::D2, 53.0), InvalidScore);
    CHECK_THROWS_AS(series(20, 11).set(Timepoint::D2, -1.0), InvalidScore);
}

TEST_CASE("the 45% responder boundary is inclusive") {
    CHECK(label_responder(series(20, 11)) == ResponseLabel::Responder); // exactly 45%
    CHECK(label_responder(series(22.4, 10.6)) == ResponseLabel::Responder);
    CHECK(label_responder(series(24.8, 20.8)) == ResponseLabel::NonResponder);

    // A configurable 50% criterion flips the boundary case.
    CHECK(label_responder(series(20, 11), 0.50) == ResponseLabel::NonResponder);
    CHECK(label_responder(series(20, 10), 0.50) == ResponseLabel::Responder);
}

TEST_CASE("labeling is monotone in the follow-up score") {
    ResponseLabel last = ResponseLabel::Responder;
    for (int score = 0; score <= 20; ++score) {
        const ResponseLabel label = label_responder(series(20, score));
        if (last == ResponseLabel::NonResponder) {
            CHECK(label == ResponseLabel::NonResponder);
        }
        last = label;
    }
}

TEST_CASE("cohort summary aggregates per arm") {
    std::vector<SubjectRecord> records;
    Rng rng(5);
    for (int i = 0; i < 18; ++i) {
        SubjectRecord rec;
        rec.subject_id = "A" + std::to_string(i);
        rec.group = TrialArm::A_Ket05;
        const int baseline = 20 + static_cast<int>(rng.below(6));
        // First 11 subjects respond.
        const int post = i < 11 ? baseline / 2 - 1 : baseline - 2;
        rec.hdrs = series(baseline, post);
        rec.label = label_responder(rec.hdrs);
        records.push_back(rec);
    }
    const auto summary = cohort_summary(records);
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].group == TrialArm::A_Ket05);
    CHECK(summary[0].n == 18);
    CHECK(summary[0].n_responders == 11);
    CHECK(summary[0].baseline_sd > 0.0);

    SUBCASE("permutation invariance") {
        auto shuffled = records;
        std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(99));
        const auto summary2 = cohort_summary(shuffled);
        CHECK(summary2[0].n_responders == summary[0].n_responders);
        CHECK(summary2[0].baseline_mean == doctest::Approx(summary[0].baseline_mean));
        CHECK(summary2[0].rate_mean == doctest::Approx(summary[0].rate_mean));
        CHECK(summary2[0].rate_sd == doctest::Approx(summary[0].rate_sd));
    }
}

TEST_CASE("single-subject groups are flagged with zero SD") {
    SubjectRecord rec;
    rec.subject_id = "C1";
    rec.group = TrialArm::C_Saline;
    rec.hdrs = series(24, 20);
    rec.label = label_responder(rec.hdrs);
    const auto summary = cohort_summary({rec});
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].degenerate_n);
    CHECK(summary[0].baseline_sd == 0.0);

    CHECK_THROWS_AS(cohort_summary({}), EmptyCohort);
}

TEST_CASE("cohort csv round-trips with blanks for missing timepoints") {
    const auto dir = std::filesystem::temp_directory_path() / "kqeeg_test_clinical";
    std::filesystem::create_directories(dir);

    std::vector<SubjectRecord> records;
    SubjectRecord a;
    a.subject_id = "S001";
    a.group = TrialArm::A_Ket05;
    a.hdrs = series(21, 9);
    a.hdrs.set(Timepoint::D7, 12);
    a.label = label_responder(a.hdrs);
    records.push_back(a);

    SubjectRecord b;
    b.subject_id = "S002";
    b.group = TrialArm::C_Saline;
    b.hdrs.set(Timepoint::T0, 25); // no follow-up yet
    records.push_back(b);

    save_cohort_csv(records, dir / "cohort.csv");
    const auto loaded = load_cohort_csv(dir / "cohort.csv");
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].label == ResponseLabel::Responder);
    CHECK(loaded[0].hdrs.at(Timepoint::D7) == 12);
    CHECK_FALSE(loaded[0].hdrs.has(Timepoint::D14));
    CHECK(loaded[1].label == ResponseLabel::Unlabeled);
    CHECK_FALSE(loaded[1].hdrs.has(Timepoint::T240));
    CHECK(loaded[1].group == TrialArm::C_Saline);
}
