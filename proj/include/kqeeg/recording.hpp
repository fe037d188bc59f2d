#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "kqeeg/channel.hpp"
#include "kqeeg/errors.hpp"

namespace kqeeg {

enum class Session { Baseline, Post240 };
enum class TrialArm { A_Ket05, B_Ket02, C_Saline };

std::string to_string(Session s);
Session session_from_string(const std::string& s);
std::string to_string(TrialArm g); // "A" | "B" | "C"
TrialArm arm_from_string(const std::string& s);

// One recorded eyes-closed session: equal-length channel traces in
// microvolts, one matrix column per channel. Immutable after construction;
// safe to share between threads.
struct Recording {
    std::string subject_id;
    Session session = Session::Baseline;
    TrialArm group = TrialArm::A_Ket05;
    double fs_hz = 0.0;
    std::vector<ChannelId> channels;
    Eigen::MatrixXd samples; // n_samples x n_channels
    std::string reference = "A2";

    Eigen::Index n_samples() const { return samples.rows(); }
    Eigen::Index n_channels() const { return samples.cols(); }
    double duration_seconds() const { return static_cast<double>(samples.rows()) / fs_hz; }

    // Index of a channel by name, or -1 when absent.
    Eigen::Index channel_index(const std::string& name) const;

    // Column view of one channel's trace; throws MissingChannel when absent.
    Eigen::Ref<const Eigen::ArrayXd> channel(const std::string& name) const;
};

struct MalformedCsv : Error {
    using Error::Error;
};

struct NonFiniteSample : Error {
    NonFiniteSample(long row, std::string channel);
    long row;
    std::string channel;
};

struct InvalidSamplingRate : Error {
    using Error::Error;
};

struct ChannelMismatch : Error {
    using Error::Error;
};

struct MissingChannel : Error {
    using Error::Error;
};

// Throws when any structural invariant is violated (lengths, finiteness, fs).
void check_invariants(const Recording& rec);

// Reads a recording from its CSV file plus JSON sidecar. The CSV header is
// `time_s,<ch1>,<ch2>,...`; channel order follows the header. The time_s
// column is advisory; sample index / fs_hz is authoritative.
Recording load_recording(const std::filesystem::path& csv_path,
                         const std::filesystem::path& meta_path);

// Writes CSV + sidecar with full-precision amplitudes (bit-exact round trip).
void save_recording(const Recording& rec,
                    const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path);

enum class FindingKind { TooShort, FlatChannel, AmplitudeOutOfRange };

struct Finding {
    FindingKind kind;
    std::string channel; // empty for recording-level findings
    std::string message;
};

// Screens a structurally valid recording for quality problems. Reports
// findings, never mutates and never throws on content.
std::vector<Finding> validate_recording(const Recording& rec, double min_seconds,
                                        double amp_limit_uv = 500.0);

} // namespace kqeeg
