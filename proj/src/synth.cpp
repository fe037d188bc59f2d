#include "kqeeg/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "kqeeg/features.hpp"
#include "kqeeg/rng.hpp"

namespace kqeeg {

namespace {

constexpr double kPi = std::numbers::pi;

// Colored noise via frequency-domain shaping of seeded white Gaussian
// spectrum: amplitude ∝ 1/f^(exponent/2), rescaled to the target RMS.
Eigen::ArrayXd colored_noise(Eigen::Index n, double fs_hz, double exponent, double rms, Rng& rng) {
    const Eigen::Index half = n / 2;
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(n));
    spec[0] = 0.0; // no DC
    for (Eigen::Index k = 1; k <= half; ++k) {
        const double f = static_cast<double>(k) * fs_hz / static_cast<double>(n);
        const double mag = std::pow(f, -exponent / 2.0);
        std::complex<double> v;
        if (k == half && n % 2 == 0) {
            v = std::complex<double>(rng.normal() * mag, 0.0); // Nyquist bin is real
        } else {
            v = std::complex<double>(rng.normal(), rng.normal()) * mag;
        }
        spec[static_cast<std::size_t>(k)] = v;
        if (k < half || n % 2 != 0) {
            spec[static_cast<std::size_t>(n - k)] = std::conj(v);
        }
    }

    Eigen::FFT<double> fft;
    std::vector<double> time;
    fft.inv(time, spec);

    Eigen::ArrayXd out = Eigen::Map<const Eigen::ArrayXd>(time.data(), n);
    const double current_rms = std::sqrt(out.square().mean());
    if (current_rms > 0.0 && rms > 0.0) {
        out *= rms / current_rms;
    } else {
        out.setZero();
    }
    return out;
}

double band_center(Band b) {
    const auto& def = band_def(b);
    return 0.5 * (def.lo_hz + def.hi_hz);
}

Eigen::ArrayXd synth_channel(const SynthSpec& spec, const Eigen::Array4d& amps, Rng rng) {
    Eigen::Index n = static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.fs_hz));
    if (n % 2 != 0) ++n; // real inverse FFT needs an even length
    Eigen::ArrayXd x = colored_noise(n, spec.fs_hz, spec.noise_exponent, spec.noise_rms_uv, rng);
    const Eigen::ArrayXd t =
        Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / spec.fs_hz;
    for (int b = 0; b < kNumBands; ++b) {
        const double amp = amps[b];
        if (amp <= 0.0) continue;
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        x += amp * (2.0 * kPi * band_center(static_cast<Band>(b)) * t + phase).sin();
    }
    return x;
}

} // namespace

Recording gen_eeg(const SynthSpec& spec, const std::string& subject_id, Session session) {
    if (!(spec.fs_hz > 0.0) || !(spec.duration_s > 0.0)) {
        throw InvalidSynthSpec("fs_hz and duration_s must be > 0");
    }
    if ((spec.band_amps_uv < 0.0).any() || spec.noise_rms_uv < 0.0) {
        throw InvalidSynthSpec("amplitudes must be >= 0");
    }
    if (!(spec.asymmetry_bias > 0.0)) throw InvalidSynthSpec("asymmetry_bias must be > 0");

    Recording rec;
    rec.subject_id = subject_id;
    rec.session = session;
    rec.fs_hz = spec.fs_hz;
    rec.channels = {kFp1, kFp2, kAF7, kAF8};

    const Rng base(spec.seed);
    // Session-specific stream so baseline and post recordings differ.
    const Rng session_rng = base.derive(session == Session::Baseline ? 11 : 12);

    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        Eigen::Array4d amps = spec.band_amps_uv;
        const bool right = rec.channels[c] == kFp2 || rec.channels[c] == kAF8;
        if (right) amps[static_cast<int>(Band::LowAlpha)] *= spec.asymmetry_bias;
        const Eigen::ArrayXd x = synth_channel(spec, amps, session_rng.derive(c));
        if (rec.samples.rows() == 0) {
            rec.samples.resize(x.size(), static_cast<Eigen::Index>(rec.channels.size()));
        }
        rec.samples.col(static_cast<Eigen::Index>(c)) = x.matrix();
    }
    return rec;
}

namespace {

// Largest integer score that still counts as a responder at this baseline.
int responder_score_cap(int baseline, double threshold) {
    int cap = static_cast<int>(std::floor((1.0 - threshold) * baseline + 1e-9));
    return std::max(cap, 0);
}

HdrsSeries gen_hdrs(const HdrsModel& model, bool responder, double threshold, Rng& rng) {
    const int baseline =
        static_cast<int>(std::clamp(std::lround(rng.normal(model.baseline_mean, model.baseline_sd)),
                                    14L, 40L));
    const double red_mean =
        responder ? model.responder_reduction_mean : model.nonresponder_reduction_mean;
    const double red_sd =
        responder ? model.responder_reduction_sd : model.nonresponder_reduction_sd;
    const double reduction = rng.normal(red_mean, red_sd);

    int s240 = static_cast<int>(std::lround(baseline * (1.0 - reduction)));
    const int cap = responder_score_cap(baseline, threshold);
    if (responder) {
        s240 = std::clamp(s240, 0, cap);
    } else {
        if (cap + 1 > 52) throw InfeasibleHdrsModel("cannot place a non-responder score");
        s240 = std::clamp(s240, cap + 1, 52);
    }

    HdrsSeries hdrs;
    hdrs.set(Timepoint::T0, baseline);
    hdrs.set(Timepoint::T240, s240);

    // Plausible in-between trajectory plus a slow drift back afterwards.
    const double drop = static_cast<double>(baseline - s240);
    const auto fill = [&](Timepoint tp, double frac) {
        const double noise = rng.normal(0.0, 1.0);
        const double v = std::clamp(baseline - frac * drop + noise, 0.0, 52.0);
        hdrs.set(tp, static_cast<double>(std::lround(v)));
    };
    fill(Timepoint::T40, 0.40);
    fill(Timepoint::T80, 0.70);
    fill(Timepoint::T120, 0.85);
    const std::array<std::pair<Timepoint, double>, 7> later{{{Timepoint::D2, 0.02},
                                                             {Timepoint::D3, 0.05},
                                                             {Timepoint::D4, 0.08},
                                                             {Timepoint::D5, 0.12},
                                                             {Timepoint::D6, 0.16},
                                                             {Timepoint::D7, 0.20},
                                                             {Timepoint::D14, 0.45}}};
    for (const auto& [tp, relapse] : later) {
        const double noise = rng.normal(0.0, 1.0);
        const double v = std::clamp(s240 + relapse * drop + noise, 0.0, 52.0);
        hdrs.set(tp, static_cast<double>(std::lround(v)));
    }
    return hdrs;
}

} // namespace

std::vector<SubjectData> gen_cohort(const CohortSpec& spec) {
    int total = 0;
    for (const auto& [arm, n] : spec.n_per_group) {
        if (n < 0) throw InvalidSynthSpec("negative group size");
        total += n;
    }
    if (total == 0) throw EmptyCohort("cohort has no subjects");
    for (const auto& [arm, f] : spec.responder_fraction) {
        if (f < 0.0 || f > 1.0) throw InvalidSynthSpec("responder fraction outside [0, 1]");
    }
    if (!(spec.theta_deficit > 0.0) || !(spec.alpha_deficit > 0.0) ||
        !(spec.post_alpha_gain > 0.0)) {
        throw InvalidSynthSpec("effect multipliers must be > 0");
    }
    if (!(spec.hdrs.baseline_mean >= 1.0) || spec.hdrs.baseline_mean > 52.0) {
        throw InfeasibleHdrsModel("baseline mean outside [1, 52]");
    }

    const Rng base(spec.seed);
    std::vector<SubjectData> cohort;
    int subject_counter = 0;

    for (const TrialArm arm : {TrialArm::A_Ket05, TrialArm::B_Ket02, TrialArm::C_Saline}) {
        const auto it = spec.n_per_group.find(arm);
        const int n = it == spec.n_per_group.end() ? 0 : it->second;
        if (n == 0) continue;
        const auto frac_it = spec.responder_fraction.find(arm);
        const double frac = frac_it == spec.responder_fraction.end() ? 0.0 : frac_it->second;
        const int n_resp = static_cast<int>(std::llround(frac * n));

        // Shuffled responder assignment within the arm.
        std::vector<int> is_responder(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n_resp; ++i) is_responder[static_cast<std::size_t>(i)] = 1;
        Rng arm_rng = base.derive(100 + static_cast<std::uint64_t>(arm));
        arm_rng.shuffle(is_responder);

        for (int i = 0; i < n; ++i) {
            const bool responder = is_responder[static_cast<std::size_t>(i)] == 1;
            ++subject_counter;
            char sid[16];
            std::snprintf(sid, sizeof(sid), "S%03d", subject_counter);

            Rng subject_rng = base.derive(1000 + static_cast<std::uint64_t>(subject_counter));

            SubjectData data;
            data.record.subject_id = sid;
            data.record.group = arm;
            data.record.hdrs = gen_hdrs(spec.hdrs, responder, spec.responder_threshold, subject_rng);
            data.record.label =
                label_responder(data.record.hdrs, spec.responder_threshold, Timepoint::T240);
            if ((data.record.label == ResponseLabel::Responder) != responder) {
                throw InfeasibleHdrsModel("generated scores do not reproduce the assigned label");
            }

            SynthSpec subject_base = spec.base;
            subject_base.seed = subject_rng.derive(1).seed();
            // Small per-subject amplitude variation keeps features from
            // collapsing to identical values.
            Rng amp_rng = subject_rng.derive(2);
            for (int b = 0; b < kNumBands; ++b) {
                subject_base.band_amps_uv[b] *= std::exp(amp_rng.normal(0.0, 0.10));
            }

            SynthSpec baseline_spec = subject_base;
            if (responder) {
                baseline_spec.band_amps_uv[static_cast<int>(Band::Theta)] *= spec.theta_deficit;
                baseline_spec.band_amps_uv[static_cast<int>(Band::LowAlpha)] *= spec.alpha_deficit;
            }
            data.baseline = gen_eeg(baseline_spec, sid, Session::Baseline);
            data.baseline.group = arm;

            if (spec.include_post) {
                SynthSpec post_spec = baseline_spec;
                if (responder) {
                    post_spec.band_amps_uv[static_cast<int>(Band::LowAlpha)] *=
                        spec.post_alpha_gain;
                }
                data.post = gen_eeg(post_spec, sid, Session::Post240);
                data.post->group = arm;
            }
            cohort.push_back(std::move(data));
        }
    }
    return cohort;
}

} // namespace kqeeg
