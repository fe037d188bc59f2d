#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kqeeg/errors.hpp"
#include "kqeeg/recording.hpp"

namespace kqeeg {

struct MissingTimepoint : Error {
    using Error::Error;
};

struct ZeroBaseline : Error {
    using Error::Error;
};

struct InvalidScore : Error {
    using Error::Error;
};

struct EmptyCohort : Error {
    using Error::Error;
};

enum class Timepoint : int {
    T0 = 0,
    T40,
    T80,
    T120,
    T240,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
    D14,
};
inline constexpr int kNumTimepoints = 12;

std::string to_string(Timepoint t); // column names: t0, t40, ..., d14
Timepoint timepoint_from_string(const std::string& s);
const std::array<Timepoint, kNumTimepoints>& all_timepoints();

// 17-item depression score series over the assessment schedule. Scores are
// integers clinically; fractional values (cohort means) are accepted.
struct HdrsSeries {
    std::map<Timepoint, double> scores;

    bool has(Timepoint t) const { return scores.count(t) > 0; }
    double at(Timepoint t) const;
    void set(Timepoint t, double score); // validates [0, 52]
};

enum class ResponseLabel { Responder, NonResponder, Unlabeled };

std::string to_string(ResponseLabel l);
ResponseLabel label_from_string(const std::string& s);

struct SubjectRecord {
    std::string subject_id;
    TrialArm group = TrialArm::A_Ket05;
    HdrsSeries hdrs;
    ResponseLabel label = ResponseLabel::Unlabeled;
};

// (baseline - score_at) / baseline, as a fraction.
double percent_reduction(const HdrsSeries& hdrs, Timepoint at);

// Responder iff the reduction reaches the threshold (inclusive).
ResponseLabel label_responder(const HdrsSeries& hdrs, double threshold = 0.45,
                              Timepoint at = Timepoint::T240);

struct GroupSummary {
    TrialArm group;
    int n = 0;
    int n_responders = 0;
    double baseline_mean = 0.0, baseline_sd = 0.0;
    double at_mean = 0.0, at_sd = 0.0;      // over subjects with the timepoint
    double rate_mean = 0.0, rate_sd = 0.0;  // percent reduction, as fractions
    int n_with_at = 0;
    bool degenerate_n = false; // n == 1, SD reported as 0
};

// Per-arm aggregation; SD is the sample standard deviation (n-1).
// Permutation-invariant over the input order.
std::vector<GroupSummary> cohort_summary(const std::vector<SubjectRecord>& records,
                                         Timepoint at = Timepoint::T240);

// `subject_id,group,t0,t40,t80,t120,t240,d2,d3,d4,d5,d6,d7,d14` with blanks
// for missing timepoints. Labels are not stored; they derive from the scores.
std::vector<SubjectRecord> load_cohort_csv(const std::filesystem::path& path,
                                           double responder_threshold = 0.45,
                                           Timepoint label_at = Timepoint::T240);
void save_cohort_csv(const std::vector<SubjectRecord>& records,
                     const std::filesystem::path& path);

} // namespace kqeeg
