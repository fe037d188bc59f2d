#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kqeeg/clinical.hpp"
#include "kqeeg/features.hpp"
#include "kqeeg/filter.hpp"
#include "kqeeg/ml.hpp"
#include "kqeeg/stats.hpp"
#include "kqeeg/synth.hpp"
#include "kqeeg/welch.hpp"

namespace kqeeg {

struct ConfigError : Error {
    using Error::Error;
};

struct FilterConfig {
    double low_hz = 1.0;
    double high_hz = 12.0;
    int order = 1024;
};

struct FeatureConfig {
    AsymmetryInput asymmetry_input = AsymmetryInput::Relative;
    CordanceNorm cordance_norm = CordanceNorm::WithinChannel;
};

struct ResponderConfig {
    double threshold = 0.45;
    Timepoint at = Timepoint::T240;
};

struct StatsConfig {
    double alpha = 0.05;
    double secondary_alpha = 0.025;
};

struct PredictConfig {
    std::vector<ClassifierKind> kinds{kAllClassifiers.begin(), kAllClassifiers.end()};
    std::vector<FeatureSet> sets{FeatureSet::Theta, FeatureSet::LowAlpha,
                                 FeatureSet::ThetaLowAlpha};
    int repeats = 10;
    Hyperparams hyper;
};

struct ValidationConfig {
    double min_seconds = 540.0;
    double amp_limit_uv = 500.0;
};

// One run's resolved settings; fully serializable so every output directory
// can echo the exact configuration that produced it.
struct StudyConfig {
    std::uint64_t seed = 42;
    std::filesystem::path out_dir = "out";
    std::filesystem::path manifest; // defaults to <out_dir>/manifest.json
    std::filesystem::path features_csv; // defaults to <out_dir>/features.csv
    FilterConfig filter;
    WelchParams welch;
    FeatureConfig features;
    ResponderConfig responder;
    StatsConfig stats;
    PredictConfig predict;
    ValidationConfig validation;
    CohortSpec simulate;

    std::filesystem::path manifest_path() const;
    std::filesystem::path features_path() const;
};

StudyConfig default_config();
StudyConfig load_config(const std::filesystem::path& path);
void save_config(const StudyConfig& config, const std::filesystem::path& path);

struct ManifestEntry {
    std::filesystem::path recording_csv;
    std::filesystem::path sidecar_json;
};

struct Manifest {
    std::vector<ManifestEntry> recordings;
    std::filesystem::path cohort_csv;
};

// Paths inside the file are stored relative to the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

struct FeatureTableRow {
    std::string subject_id;
    Session session = Session::Baseline;
    TrialArm group = TrialArm::A_Ket05;
    ResponseLabel label = ResponseLabel::Unlabeled;
    Eigen::VectorXd values;
};

struct FeatureTable {
    std::vector<std::string> feature_names;
    std::vector<FeatureTableRow> rows;

    Eigen::Index column(const std::string& name) const; // throws if unknown
    double value(const FeatureTableRow& row, const std::string& name) const;
};

void save_feature_table(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable load_feature_table(const std::filesystem::path& path);

// Fixed 40-column layout: relative and dB band power per band x channel,
// alpha asymmetry per band x pair, theta cordance per channel.
std::vector<std::string> feature_column_names();

// Filter -> Welch -> band powers for every channel of one recording.
std::map<std::string, BandPowers> channel_band_powers(const Recording& rec,
                                                      const StudyConfig& config);

FeatureTableRow extract_row(const Recording& rec, ResponseLabel label,
                            const StudyConfig& config);

// simulate: writes recordings, sidecars, cohort csv and manifest under
// out_dir; everything derives from config.simulate and config.seed.
int run_simulate(const StudyConfig& config);

struct FeaturesResult {
    FeatureTable table;
    std::vector<std::string> errors;   // per-subject failures, batch continues
    std::vector<std::string> warnings; // validation findings
};

FeaturesResult compute_features(const StudyConfig& config);
int run_features(const StudyConfig& config, bool dump_psd = false);

struct StatsReport {
    std::vector<GroupSummary> cohort;
    std::vector<ComparisonOutcome> baseline_power; // responders vs non, per arm
    std::vector<ComparisonOutcome> paired;         // baseline vs post, per cohort
};

StatsReport compute_stats(const FeatureTable& table, const std::vector<SubjectRecord>& records,
                          const StudyConfig& config);
int run_stats(const StudyConfig& config);

struct PredictCell {
    std::string cohort; // "mixed", "A", "B"
    ClassifierKind kind;
    FeatureSet set;
    EvalReport report;
};

struct PredictReport {
    std::vector<PredictCell> cells;
    std::string best_cohort;
    ClassifierKind best_kind = ClassifierKind::SvmRbf;
    FeatureSet best_set = FeatureSet::ThetaLowAlpha;
};

// Builds the classifier dataset from baseline rows of one cohort subset.
Dataset dataset_from_table(const FeatureTable& table, FeatureSet set,
                           const std::vector<TrialArm>& arms);

PredictReport compute_predict(const FeatureTable& table, const StudyConfig& config);
int run_predict(const StudyConfig& config);

int run_report(const StudyConfig& config);

// Rendered text tables (also embedded in the report subcommand output).
std::string render_stats_text(const StatsReport& report, const StudyConfig& config);
std::string render_predict_text(const PredictReport& report);

} // namespace kqeeg
