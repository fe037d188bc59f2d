#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kqeeg/errors.hpp"

namespace kqeeg {

struct DatasetError : Error {
    using Error::Error;
};

struct SingleClassData : Error {
    using Error::Error;
};

struct DegenerateGeometry : Error {
    using Error::Error;
};

struct DegenerateConfusion : Error {
    using Error::Error;
};

// Labeled feature rows. Label 1 is the positive class (responder) for every
// screening metric.
struct Dataset {
    Eigen::MatrixXd x; // rows x features
    std::vector<int> y;
    std::vector<std::string> subject_ids;
    std::vector<std::string> feature_names;

    Eigen::Index rows() const { return x.rows(); }
    Eigen::Index cols() const { return x.cols(); }
    int count_label(int label) const;
    void check() const; // shape + label invariants
};

// Per-feature z-scoring transform; zero-variance features map to 0.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd; // sample SD; entries of 0 flag zero variance
    std::vector<int> zero_variance;

    Eigen::VectorXd apply(Eigen::Ref<const Eigen::VectorXd> row) const;
    Eigen::MatrixXd apply_all(const Eigen::MatrixXd& x) const;
};

Standardizer fit_standardizer(const Dataset& train);

// Duplicates seeded draws (with replacement) from the minority class until
// class counts are equal. Original rows are preserved unchanged.
Dataset oversample_minority(const Dataset& train, std::uint64_t seed);

enum class ClassifierKind { Lda, Nmsc, Knn3, Parzen, Perceptron, SvmRbf };
inline constexpr std::array<ClassifierKind, 6> kAllClassifiers{
    ClassifierKind::Lda,    ClassifierKind::Nmsc,       ClassifierKind::Knn3,
    ClassifierKind::Parzen, ClassifierKind::Perceptron, ClassifierKind::SvmRbf};

std::string to_string(ClassifierKind k);
ClassifierKind classifier_from_string(const std::string& s);

struct Hyperparams {
    double svm_c = 10.0;
    double svm_gamma = 1.0;
    double svm_tol = 1e-3;
    int knn_k = 3;
    double lda_ridge_scale = 1e-6;
    double perceptron_lr = 1.0;
    int perceptron_max_epochs = 1000;
};

// Fitted classifier. Learned state lives in standardized feature space; the
// standardizer is fitted on the training rows and stored with the model.
struct TrainedModel {
    ClassifierKind kind = ClassifierKind::Nmsc;
    Hyperparams hyper;
    Standardizer standardizer;

    Eigen::VectorXd lda_w;
    double lda_b = 0.0;
    Eigen::VectorXd mean_pos, mean_neg;
    Eigen::MatrixXd train_x; // KNN / Parzen / SVM reference rows
    std::vector<int> train_y;
    double parzen_h_pos = 0.0, parzen_h_neg = 0.0, parzen_prior_pos = 0.5;
    Eigen::VectorXd perceptron_w;
    double perceptron_b = 0.0;
    Eigen::VectorXd svm_alpha;
    double svm_b = 0.0;

    bool converged = true;
    std::string note;
};

TrainedModel train(ClassifierKind kind, const Dataset& train_set, const Hyperparams& hyper = {},
                   std::uint64_t seed = 0);

int predict(const TrainedModel& model, Eigen::Ref<const Eigen::VectorXd> row);

// Signed score; > 0 predicts the positive class. KNN reports the vote margin.
double decision_value(const TrainedModel& model, Eigen::Ref<const Eigen::VectorXd> row);

// All values are percentages; a ratio with zero denominator is absent.
struct Metrics {
    std::optional<double> accuracy, sensitivity, specificity, recall, precision, f_measure;
};

Metrics compute_metrics(int tp, int fn, int tn, int fp);

struct FoldResult {
    int tp = 0, fn = 0, tn = 0, fp = 0;
    Metrics metrics;
};

struct MetricSummary {
    double mean = 0.0;
    double sd = 0.0;
    int n_used = 0;
    int n_excluded = 0;
};

enum class CvScheme { ThreeFold, LeaveOneSubjectOut };

std::string to_string(CvScheme s);

struct EvalReport {
    CvScheme scheme = CvScheme::ThreeFold;
    ClassifierKind kind = ClassifierKind::Nmsc;
    std::vector<FoldResult> per_fold;
    std::map<std::string, MetricSummary> summary;
    std::uint64_t seed = 0;
    int repeats = 1;

    double mean_of(const std::string& metric) const { return summary.at(metric).mean; }
};

// Stratified seeded 3-fold CV, repeated; each fold runs the full pipeline
// oversample -> standardize -> train on the training split only.
EvalReport three_fold_cv(const Dataset& data, ClassifierKind kind, const Hyperparams& hyper = {},
                         std::uint64_t seed = 0, int repeats = 10);

// One fold per subject; all of a subject's rows are held out together.
EvalReport loso_cv(const Dataset& data, ClassifierKind kind, const Hyperparams& hyper = {},
                   std::uint64_t seed = 0);

// FNV-1a over the bit patterns of features, labels and subject ids.
std::string dataset_fingerprint(const Dataset& data);

void save_model(const TrainedModel& model, const std::filesystem::path& path,
                const std::string& data_fingerprint = "", std::uint64_t seed = 0);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace kqeeg
