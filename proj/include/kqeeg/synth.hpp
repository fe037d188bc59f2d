#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "kqeeg/clinical.hpp"
#include "kqeeg/errors.hpp"
#include "kqeeg/recording.hpp"

namespace kqeeg {

struct InvalidSynthSpec : Error {
    using Error::Error;
};

struct InfeasibleHdrsModel : Error {
    using Error::Error;
};

// Settings for one synthetic recording: 1/f^exponent background noise plus
// one sinusoid per band at the band center, amplitudes in microvolts. The
// right-side channels' low-alpha amplitude is scaled by asymmetry_bias.
struct SynthSpec {
    double fs_hz = 512.0;
    double duration_s = 600.0;
    double noise_exponent = 1.0;
    double noise_rms_uv = 2.0;
    Eigen::Array4d band_amps_uv{4.0, 3.0, 3.5, 2.0}; // delta, theta, low/high alpha
    double asymmetry_bias = 1.0;
    std::uint64_t seed = 0;
};

// Deterministic four-channel recording (Fp1, Fp2, AF7, AF8 column order).
Recording gen_eeg(const SynthSpec& spec, const std::string& subject_id = "synth",
                  Session session = Session::Baseline);

struct HdrsModel {
    double baseline_mean = 23.5;
    double baseline_sd = 4.4;
    double responder_reduction_mean = 0.55;
    double responder_reduction_sd = 0.07;
    double nonresponder_reduction_mean = 0.18;
    double nonresponder_reduction_sd = 0.12;
};

// Cohort construction. Responders get theta_deficit (and alpha_deficit) on
// their baseline band amplitudes and post_alpha_gain on low alpha at the
// post-treatment session; generated HDRS scores reproduce the assigned labels
// exactly.
struct CohortSpec {
    std::map<TrialArm, int> n_per_group{{TrialArm::A_Ket05, 18},
                                        {TrialArm::B_Ket02, 19},
                                        {TrialArm::C_Saline, 18}};
    std::map<TrialArm, double> responder_fraction{{TrialArm::A_Ket05, 11.0 / 18.0},
                                                  {TrialArm::B_Ket02, 5.0 / 19.0},
                                                  {TrialArm::C_Saline, 2.0 / 18.0}};
    double theta_deficit = 0.5;    // responders' baseline theta multiplier (< 1)
    double alpha_deficit = 1.0;    // responders' baseline low-alpha multiplier
    double post_alpha_gain = 1.5;  // responders' post-session low-alpha multiplier (> 1)
    HdrsModel hdrs;
    SynthSpec base; // recording settings shared by all subjects
    std::uint64_t seed = 0;
    bool include_post = true;
    double responder_threshold = 0.45;
};

struct SubjectData {
    SubjectRecord record;
    Recording baseline;
    std::optional<Recording> post;
};

// Pure function of the spec: same spec, same cohort.
std::vector<SubjectData> gen_cohort(const CohortSpec& spec);

} // namespace kqeeg
