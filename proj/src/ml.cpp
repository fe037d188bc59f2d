#include "kqeeg/ml.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "kqeeg/rng.hpp"

namespace kqeeg {

using nlohmann::json;

int Dataset::count_label(int label) const {
    return static_cast<int>(std::count(y.begin(), y.end(), label));
}

void Dataset::check() const {
    if (x.rows() == 0) throw DatasetError("dataset is empty");
    if (static_cast<Eigen::Index>(y.size()) != x.rows()) {
        throw DatasetError("label count does not match row count");
    }
    if (!subject_ids.empty() && static_cast<Eigen::Index>(subject_ids.size()) != x.rows()) {
        throw DatasetError("subject id count does not match row count");
    }
    for (int label : y) {
        if (label != 0 && label != 1) throw DatasetError("labels must be 0 or 1");
    }
}

Eigen::VectorXd Standardizer::apply(Eigen::Ref<const Eigen::VectorXd> row) const {
    if (row.size() != mean.size()) throw DatasetError("feature dimension mismatch");
    Eigen::VectorXd out(row.size());
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        out[j] = sd[j] > 0.0 ? (row[j] - mean[j]) / sd[j] : 0.0;
    }
    return out;
}

Eigen::MatrixXd Standardizer::apply_all(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out.row(i) = apply(x.row(i).transpose()).transpose();
    }
    return out;
}

Standardizer fit_standardizer(const Dataset& train) {
    train.check();
    if (train.rows() < 2) throw DatasetError("standardization needs at least 2 rows");
    Standardizer s;
    const Eigen::Index d = train.cols();
    s.mean.resize(d);
    s.sd.resize(d);
    const double n = static_cast<double>(train.rows());
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto col = train.x.col(j);
        s.mean[j] = col.mean();
        const double ss = (col.array() - s.mean[j]).square().sum();
        const double sd = std::sqrt(ss / (n - 1.0));
        s.sd[j] = sd;
        if (sd == 0.0) s.zero_variance.push_back(static_cast<int>(j));
    }
    return s;
}

Dataset oversample_minority(const Dataset& train, std::uint64_t seed) {
    train.check();
    const int n_pos = train.count_label(1);
    const int n_neg = train.count_label(0);
    if (n_pos == 0 || n_neg == 0) throw SingleClassData("both classes must be present");
    if (n_pos == n_neg) return train;

    const int minority = n_pos < n_neg ? 1 : 0;
    const int deficit = std::abs(n_pos - n_neg);
    std::vector<Eigen::Index> minority_rows;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        if (train.y[static_cast<std::size_t>(i)] == minority) minority_rows.push_back(i);
    }

    Rng rng(seed);
    Dataset out = train;
    out.x.conservativeResize(train.rows() + deficit, Eigen::NoChange);
    for (int k = 0; k < deficit; ++k) {
        const Eigen::Index src = minority_rows[rng.below(minority_rows.size())];
        out.x.row(train.rows() + k) = train.x.row(src);
        out.y.push_back(minority);
        if (!train.subject_ids.empty()) {
            out.subject_ids.push_back(train.subject_ids[static_cast<std::size_t>(src)]);
        }
    }
    return out;
}

std::string to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Lda: return "lda";
        case ClassifierKind::Nmsc: return "nmsc";
        case ClassifierKind::Knn3: return "knn3";
        case ClassifierKind::Parzen: return "parzen";
        case ClassifierKind::Perceptron: return "perceptron";
        case ClassifierKind::SvmRbf: return "svm_rbf";
    }
    return "?";
}

ClassifierKind classifier_from_string(const std::string& s) {
    for (const auto k : kAllClassifiers) {
        if (to_string(k) == s) return k;
    }
    throw Error("unknown classifier kind: " + s);
}

std::string to_string(CvScheme s) {
    return s == CvScheme::ThreeFold ? "three_fold" : "leave_one_subject_out";
}

namespace {

Eigen::VectorXd class_mean(const Eigen::MatrixXd& x, const std::vector<int>& y, int label) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(x.cols());
    int n = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (y[static_cast<std::size_t>(i)] == label) {
            m += x.row(i).transpose();
            ++n;
        }
    }
    return m / static_cast<double>(n);
}

void fit_lda(TrainedModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y) {
    const Eigen::Index d = x.cols();
    const Eigen::VectorXd m_pos = class_mean(x, y, 1);
    const Eigen::VectorXd m_neg = class_mean(x, y, 0);

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Eigen::VectorXd c =
            x.row(i).transpose() - (y[static_cast<std::size_t>(i)] == 1 ? m_pos : m_neg);
        scatter += c * c.transpose();
    }
    const double denom = std::max<double>(1.0, static_cast<double>(x.rows() - 2));
    Eigen::MatrixXd cov = scatter / denom;
    const double trace = cov.trace();
    const double ridge =
        model.hyper.lda_ridge_scale * (trace > 0.0 ? trace / static_cast<double>(d) : 1.0);
    cov += ridge * Eigen::MatrixXd::Identity(d, d);

    const Eigen::VectorXd w = cov.ldlt().solve(m_pos - m_neg);
    const int n_pos = static_cast<int>(std::count(y.begin(), y.end(), 1));
    const int n_neg = static_cast<int>(y.size()) - n_pos;
    model.lda_w = w;
    model.lda_b = -0.5 * w.dot(m_pos + m_neg) +
                  std::log(static_cast<double>(n_pos) / static_cast<double>(n_neg));
    model.mean_pos = m_pos;
    model.mean_neg = m_neg;
}

double silverman_bandwidth(const Eigen::MatrixXd& x, const std::vector<int>& y, int label) {
    const Eigen::Index d = x.cols();
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (y[static_cast<std::size_t>(i)] == label) rows.push_back(i);
    }
    const double n = static_cast<double>(rows.size());
    double sd_sum = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        double mean = 0.0;
        for (const auto r : rows) mean += x(r, j);
        mean /= n;
        double ss = 0.0;
        for (const auto r : rows) ss += (x(r, j) - mean) * (x(r, j) - mean);
        sd_sum += n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    const double sigma = sd_sum / static_cast<double>(d);
    const double factor = std::pow(4.0 / ((static_cast<double>(d) + 2.0) * n),
                                   1.0 / (static_cast<double>(d) + 4.0));
    return sigma * factor;
}

void fit_parzen(TrainedModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y) {
    model.train_x = x;
    model.train_y = y;
    model.parzen_h_pos = silverman_bandwidth(x, y, 1);
    model.parzen_h_neg = silverman_bandwidth(x, y, 0);
    // A class of identical rows has zero spread; fall back to a small fixed
    // bandwidth so the density stays evaluable.
    if (model.parzen_h_pos <= 0.0) {
        model.parzen_h_pos = 1e-3;
        model.note += "parzen: zero spread in positive class; ";
    }
    if (model.parzen_h_neg <= 0.0) {
        model.parzen_h_neg = 1e-3;
        model.note += "parzen: zero spread in negative class; ";
    }
    const int n_pos = static_cast<int>(std::count(y.begin(), y.end(), 1));
    model.parzen_prior_pos = static_cast<double>(n_pos) / static_cast<double>(y.size());
}

void fit_perceptron(TrainedModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y,
                    std::uint64_t seed) {
    const Eigen::Index n = x.rows();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
    double b = 0.0;
    Eigen::VectorXd best_w = w;
    double best_b = b;
    int best_correct = -1;

    auto count_correct = [&](const Eigen::VectorXd& wv, double bv) {
        int correct = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = wv.dot(x.row(i).transpose()) + bv;
            const int pred = s > 0.0 ? 1 : 0;
            if (pred == y[static_cast<std::size_t>(i)]) ++correct;
        }
        return correct;
    };

    Rng rng(seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    bool converged = false;
    for (int epoch = 0; epoch < model.hyper.perceptron_max_epochs; ++epoch) {
        rng.shuffle(order);
        int mistakes = 0;
        for (const auto i : order) {
            const double target = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
            const double s = w.dot(x.row(i).transpose()) + b;
            if (target * s <= 0.0) {
                w += model.hyper.perceptron_lr * target * x.row(i).transpose();
                b += model.hyper.perceptron_lr * target;
                ++mistakes;
            }
        }
        // Pocket: keep the best weights seen on the training set.
        const int correct = count_correct(w, b);
        if (correct > best_correct) {
            best_correct = correct;
            best_w = w;
            best_b = b;
        }
        if (mistakes == 0) {
            converged = true;
            break;
        }
    }
    model.perceptron_w = best_w;
    model.perceptron_b = best_b;
    if (!converged) {
        model.converged = false;
        model.note += "perceptron: pocket stopped at epoch cap; ";
    }
}

// Platt-style SMO for the RBF-kernel soft-margin dual.
void fit_svm(TrainedModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y) {
    const Eigen::Index n = x.rows();
    const double c = model.hyper.svm_c;
    const double gamma = model.hyper.svm_gamma;
    const double tol = model.hyper.svm_tol;
    constexpr double kEps = 1e-12;

    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) target[i] = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;

    Eigen::MatrixXd kmat(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double k = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
            kmat(i, j) = k;
            kmat(j, i) = k;
        }
    }

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    double b = 0.0;

    auto f_of = [&](Eigen::Index i) {
        return (alpha.array() * target.array() * kmat.col(i).array()).sum() + b;
    };

    auto take_step = [&](Eigen::Index i1, Eigen::Index i2, double e2) -> bool {
        if (i1 == i2) return false;
        const double a1 = alpha[i1], a2 = alpha[i2];
        const double y1 = target[i1], y2 = target[i2];
        const double e1 = f_of(i1) - y1;
        const double s = y1 * y2;
        double lo, hi;
        if (s < 0.0) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c, c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c);
            hi = std::min(c, a1 + a2);
        }
        if (lo >= hi) return false;
        const double eta = kmat(i1, i1) + kmat(i2, i2) - 2.0 * kmat(i1, i2);
        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, lo, hi);
        } else {
            // Flat direction: pick the boundary with the lower objective.
            const double f1 = y1 * (e1 - b) - a1 * kmat(i1, i1) - s * a2 * kmat(i1, i2);
            const double f2 = y2 * (e2 - b) - a2 * kmat(i2, i2) - s * a1 * kmat(i1, i2);
            const double l1 = a1 + s * (a2 - lo);
            const double h1 = a1 + s * (a2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * kmat(i1, i1) +
                                  0.5 * lo * lo * kmat(i2, i2) + s * lo * l1 * kmat(i1, i2);
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * kmat(i1, i1) +
                                  0.5 * hi * hi * kmat(i2, i2) + s * hi * h1 * kmat(i1, i2);
            if (obj_lo < obj_hi - kEps) {
                a2_new = lo;
            } else if (obj_lo > obj_hi + kEps) {
                a2_new = hi;
            } else {
                a2_new = a2;
            }
        }
        if (std::abs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;
        const double a1_new = a1 + s * (a2 - a2_new);

        // Threshold so the updated point sits on its margin (decision
        // convention: f(x) = sum(alpha*y*K) + b).
        const double b1 = b - (e1 + y1 * (a1_new - a1) * kmat(i1, i1) +
                               y2 * (a2_new - a2) * kmat(i1, i2));
        const double b2 = b - (e2 + y1 * (a1_new - a1) * kmat(i1, i2) +
                               y2 * (a2_new - a2) * kmat(i2, i2));
        if (a1_new > 0.0 && a1_new < c) {
            b = b1;
        } else if (a2_new > 0.0 && a2_new < c) {
            b = b2;
        } else {
            b = 0.5 * (b1 + b2);
        }
        alpha[i1] = a1_new;
        alpha[i2] = a2_new;
        return true;
    };

    auto examine = [&](Eigen::Index i2) -> bool {
        const double y2 = target[i2];
        const double a2 = alpha[i2];
        const double e2 = f_of(i2) - y2;
        const double r2 = e2 * y2;
        if ((r2 < -tol && a2 < c) || (r2 > tol && a2 > 0.0)) {
            // Second-choice heuristic: maximize |e1 - e2| over non-bound points.
            Eigen::Index best = -1;
            double best_gap = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (alpha[i] > 0.0 && alpha[i] < c) {
                    const double gap = std::abs((f_of(i) - target[i]) - e2);
                    if (gap > best_gap) {
                        best_gap = gap;
                        best = i;
                    }
                }
            }
            if (best >= 0 && take_step(best, i2, e2)) return true;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (alpha[i] > 0.0 && alpha[i] < c && take_step(i, i2, e2)) return true;
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                if (take_step(i, i2, e2)) return true;
            }
        }
        return false;
    };

    bool examine_all = true;
    int changed = 1;
    const int max_sweeps = 500;
    int sweeps = 0;
    while (changed > 0 || examine_all) {
        changed = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (examine_all || (alpha[i] > 0.0 && alpha[i] < c)) {
                if (examine(i)) ++changed;
            }
        }
        if (examine_all) {
            examine_all = false;
        } else if (changed == 0) {
            examine_all = true;
        }
        if (++sweeps > max_sweeps) {
            model.converged = false;
            model.note += "svm: smo stopped at sweep cap; ";
            break;
        }
    }

    model.train_x = x;
    model.train_y = y;
    model.svm_alpha = alpha;
    model.svm_b = b;
}

double svm_decision(const TrainedModel& model, Eigen::Ref<const Eigen::VectorXd> z) {
    double s = model.svm_b;
    for (Eigen::Index i = 0; i < model.train_x.rows(); ++i) {
        if (model.svm_alpha[i] == 0.0) continue;
        const double t = model.train_y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
        const double k =
            std::exp(-model.hyper.svm_gamma * (model.train_x.row(i).transpose() - z).squaredNorm());
        s += model.svm_alpha[i] * t * k;
    }
    return s;
}

double parzen_log_density(const Eigen::MatrixXd& x, const std::vector<int>& y, int label,
                          double h, Eigen::Ref<const Eigen::VectorXd> z) {
    const double d = static_cast<double>(x.cols());
    double sum = 0.0;
    int n = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (y[static_cast<std::size_t>(i)] != label) continue;
        sum += std::exp(-(x.row(i).transpose() - z).squaredNorm() / (2.0 * h * h));
        ++n;
    }
    const double norm = std::pow(2.0 * std::numbers::pi * h * h, d / 2.0);
    if (sum <= 0.0) return -1e300;
    return std::log(sum / (static_cast<double>(n) * norm));
}

} // namespace

TrainedModel train(ClassifierKind kind, const Dataset& train_set, const Hyperparams& hyper,
                   std::uint64_t seed) {
    train_set.check();
    if (train_set.count_label(0) == 0 || train_set.count_label(1) == 0) {
        throw SingleClassData("training requires both classes");
    }
    bool all_identical = true;
    for (Eigen::Index i = 1; i < train_set.rows() && all_identical; ++i) {
        all_identical = train_set.x.row(i) == train_set.x.row(0);
    }
    if (all_identical) throw DegenerateGeometry("all training rows are identical");

    TrainedModel model;
    model.kind = kind;
    model.hyper = hyper;
    model.standardizer = fit_standardizer(train_set);
    const Eigen::MatrixXd z = model.standardizer.apply_all(train_set.x);

    switch (kind) {
        case ClassifierKind::Lda:
            fit_lda(model, z, train_set.y);
            break;
        case ClassifierKind::Nmsc:
            model.mean_pos = class_mean(z, train_set.y, 1);
            model.mean_neg = class_mean(z, train_set.y, 0);
            break;
        case ClassifierKind::Knn3:
            model.train_x = z;
            model.train_y = train_set.y;
            break;
        case ClassifierKind::Parzen:
            fit_parzen(model, z, train_set.y);
            break;
        case ClassifierKind::Perceptron:
            fit_perceptron(model, z, train_set.y, seed);
            break;
        case ClassifierKind::SvmRbf:
            fit_svm(model, z, train_set.y);
            break;
    }
    return model;
}

double decision_value(const TrainedModel& model, Eigen::Ref<const Eigen::VectorXd> row) {
    const Eigen::VectorXd z = model.standardizer.apply(row);
    switch (model.kind) {
        case ClassifierKind::Lda:
            return model.lda_w.dot(z) + model.lda_b;
        case ClassifierKind::Nmsc:
            return (z - model.mean_neg).norm() - (z - model.mean_pos).norm();
        case ClassifierKind::Knn3: {
            const Eigen::Index n = model.train_x.rows();
            std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) {
                dist[static_cast<std::size_t>(i)] = {
                    (model.train_x.row(i).transpose() - z).squaredNorm(), i};
            }
            const int k = std::min<int>(model.hyper.knn_k, static_cast<int>(n));
            // Distance ties break toward the lower row index.
            std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
            int votes = 0;
            for (int i = 0; i < k; ++i) {
                votes += model.train_y[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)] == 1
                             ? 1
                             : -1;
            }
            return static_cast<double>(votes);
        }
        case ClassifierKind::Parzen: {
            const double lp = std::log(model.parzen_prior_pos) +
                              parzen_log_density(model.train_x, model.train_y, 1,
                                                 model.parzen_h_pos, z);
            const double ln = std::log(1.0 - model.parzen_prior_pos) +
                              parzen_log_density(model.train_x, model.train_y, 0,
                                                 model.parzen_h_neg, z);
            return lp - ln;
        }
        case ClassifierKind::Perceptron:
            return model.perceptron_w.dot(z) + model.perceptron_b;
        case ClassifierKind::SvmRbf:
            return svm_decision(model, z);
    }
    return 0.0;
}

int predict(const TrainedModel& model, Eigen::Ref<const Eigen::VectorXd> row) {
    return decision_value(model, row) > 0.0 ? 1 : 0;
}

Metrics compute_metrics(int tp, int fn, int tn, int fp) {
    if (tp < 0 || fn < 0 || tn < 0 || fp < 0) throw DegenerateConfusion("negative count");
    const int total = tp + fn + tn + fp;
    if (total == 0) throw DegenerateConfusion("all-zero confusion matrix");

    Metrics m;
    m.accuracy = 100.0 * static_cast<double>(tp + tn) / total;
    if (tp + fn > 0) {
        m.sensitivity = 100.0 * static_cast<double>(tp) / (tp + fn);
        m.recall = m.sensitivity;
    }
    if (tn + fp > 0) m.specificity = 100.0 * static_cast<double>(tn) / (tn + fp);
    if (tp + fp > 0) m.precision = 100.0 * static_cast<double>(tp) / (tp + fp);
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
        m.f_measure = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    return m;
}

namespace {

const std::array<const char*, 6> kMetricKeys{"accuracy",  "sensitivity", "specificity",
                                             "recall",    "precision",   "f_measure"};

std::optional<double> metric_by_key(const Metrics& m, const std::string& key) {
    if (key == "accuracy") return m.accuracy;
    if (key == "sensitivity") return m.sensitivity;
    if (key == "specificity") return m.specificity;
    if (key == "recall") return m.recall;
    if (key == "precision") return m.precision;
    return m.f_measure;
}

void summarize(EvalReport& report) {
    for (const auto* key : kMetricKeys) {
        MetricSummary s;
        std::vector<double> vals;
        for (const auto& fold : report.per_fold) {
            const auto v = metric_by_key(fold.metrics, key);
            if (v) {
                vals.push_back(*v);
            } else {
                ++s.n_excluded;
            }
        }
        s.n_used = static_cast<int>(vals.size());
        if (!vals.empty()) {
            double sum = 0.0;
            for (double v : vals) sum += v;
            s.mean = sum / static_cast<double>(vals.size());
            if (vals.size() > 1) {
                double ss = 0.0;
                for (double v : vals) ss += (v - s.mean) * (v - s.mean);
                s.sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
            }
        }
        report.summary[key] = s;
    }
}

Dataset subset(const Dataset& data, const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), data.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(rows[i]);
        out.y.push_back(data.y[static_cast<std::size_t>(rows[i])]);
        if (!data.subject_ids.empty()) {
            out.subject_ids.push_back(data.subject_ids[static_cast<std::size_t>(rows[i])]);
        }
    }
    return out;
}

FoldResult run_fold(const Dataset& train_set, const Dataset& test_set, ClassifierKind kind,
                    const Hyperparams& hyper, std::uint64_t fold_seed) {
    const Dataset balanced = oversample_minority(train_set, fold_seed);
    const TrainedModel model = train(kind, balanced, hyper, fold_seed);
    FoldResult fold;
    for (Eigen::Index i = 0; i < test_set.rows(); ++i) {
        const int pred = predict(model, test_set.x.row(i).transpose());
        const int truth = test_set.y[static_cast<std::size_t>(i)];
        if (truth == 1) {
            pred == 1 ? ++fold.tp : ++fold.fn;
        } else {
            pred == 0 ? ++fold.tn : ++fold.fp;
        }
    }
    fold.metrics = compute_metrics(fold.tp, fold.fn, fold.tn, fold.fp);
    return fold;
}

} // namespace

EvalReport three_fold_cv(const Dataset& data, ClassifierKind kind, const Hyperparams& hyper,
                         std::uint64_t seed, int repeats) {
    data.check();
    if (data.count_label(0) < 3 || data.count_label(1) < 3) {
        throw DatasetError("three-fold CV needs at least 3 rows per class");
    }

    EvalReport report;
    report.scheme = CvScheme::ThreeFold;
    report.kind = kind;
    report.seed = seed;
    report.repeats = repeats;

    const Rng base(seed);
    for (int rep = 0; rep < repeats; ++rep) {
        Rng rng = base.derive(static_cast<std::uint64_t>(rep));

        // Stratified assignment: shuffle each class, deal round-robin.
        std::array<std::vector<Eigen::Index>, 3> folds;
        for (int label : {1, 0}) {
            std::vector<Eigen::Index> rows;
            for (Eigen::Index i = 0; i < data.rows(); ++i) {
                if (data.y[static_cast<std::size_t>(i)] == label) rows.push_back(i);
            }
            rng.shuffle(rows);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                folds[i % 3].push_back(rows[i]);
            }
        }

        for (int f = 0; f < 3; ++f) {
            std::vector<Eigen::Index> train_rows;
            for (int g = 0; g < 3; ++g) {
                if (g == f) continue;
                train_rows.insert(train_rows.end(), folds[static_cast<std::size_t>(g)].begin(),
                                  folds[static_cast<std::size_t>(g)].end());
            }
            std::sort(train_rows.begin(), train_rows.end());
            std::vector<Eigen::Index> test_rows = folds[static_cast<std::size_t>(f)];
            std::sort(test_rows.begin(), test_rows.end());

            const std::uint64_t fold_seed =
                base.derive(1000 + static_cast<std::uint64_t>(rep) * 3 + static_cast<std::uint64_t>(f))
                    .seed();
            report.per_fold.push_back(
                run_fold(subset(data, train_rows), subset(data, test_rows), kind, hyper, fold_seed));
        }
    }
    summarize(report);
    return report;
}

EvalReport loso_cv(const Dataset& data, ClassifierKind kind, const Hyperparams& hyper,
                   std::uint64_t seed) {
    data.check();
    if (data.subject_ids.empty()) throw DatasetError("LOSO needs subject ids");
    std::set<std::string> unique(data.subject_ids.begin(), data.subject_ids.end());
    if (unique.size() < 2) throw DatasetError("LOSO needs at least 2 subjects");

    EvalReport report;
    report.scheme = CvScheme::LeaveOneSubjectOut;
    report.kind = kind;
    report.seed = seed;
    report.repeats = 1;

    const Rng base(seed);
    std::uint64_t fold_index = 0;
    for (const auto& held_out : unique) {
        std::vector<Eigen::Index> train_rows, test_rows;
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            if (data.subject_ids[static_cast<std::size_t>(i)] == held_out) {
                test_rows.push_back(i);
            } else {
                train_rows.push_back(i);
            }
        }
        const std::uint64_t fold_seed = base.derive(2000 + fold_index++).seed();
        report.per_fold.push_back(
            run_fold(subset(data, train_rows), subset(data, test_rows), kind, hyper, fold_seed));
    }
    summarize(report);
    return report;
}

std::string dataset_fingerprint(const Dataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_byte = [&h](unsigned char b) {
        h ^= b;
        h *= 0x100000001b3ULL;
    };
    auto mix_double = [&](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(bits >> (8 * i)));
    };
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.x.cols(); ++j) mix_double(data.x(i, j));
        mix_byte(static_cast<unsigned char>(data.y[static_cast<std::size_t>(i)]));
        if (!data.subject_ids.empty()) {
            for (char c : data.subject_ids[static_cast<std::size_t>(i)]) {
                mix_byte(static_cast<unsigned char>(c));
            }
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_to_json(m.row(i).transpose()));
    return a;
}

Eigen::MatrixXd mat_from_json(const json& a) {
    if (a.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(a.size()),
                      static_cast<Eigen::Index>(a[0].size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = vec_from_json(a[i]).transpose();
    }
    return m;
}

} // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path,
                const std::string& data_fingerprint, std::uint64_t seed) {
    json j;
    j["kind"] = to_string(model.kind);
    j["hyperparams"] = {{"svm_c", model.hyper.svm_c},
                        {"svm_gamma", model.hyper.svm_gamma},
                        {"svm_tol", model.hyper.svm_tol},
                        {"knn_k", model.hyper.knn_k},
                        {"lda_ridge_scale", model.hyper.lda_ridge_scale},
                        {"perceptron_lr", model.hyper.perceptron_lr},
                        {"perceptron_max_epochs", model.hyper.perceptron_max_epochs}};
    j["standardization"] = {{"mean", vec_to_json(model.standardizer.mean)},
                            {"sd", vec_to_json(model.standardizer.sd)},
                            {"zero_variance", model.standardizer.zero_variance}};
    j["fingerprint"] = {{"data_hash", data_fingerprint}, {"seed", seed}};
    j["converged"] = model.converged;
    j["note"] = model.note;

    json params;
    params["lda_w"] = vec_to_json(model.lda_w);
    params["lda_b"] = model.lda_b;
    params["mean_pos"] = vec_to_json(model.mean_pos);
    params["mean_neg"] = vec_to_json(model.mean_neg);
    params["train_x"] = mat_to_json(model.train_x);
    params["train_y"] = model.train_y;
    params["parzen_h_pos"] = model.parzen_h_pos;
    params["parzen_h_neg"] = model.parzen_h_neg;
    params["parzen_prior_pos"] = model.parzen_prior_pos;
    params["perceptron_w"] = vec_to_json(model.perceptron_w);
    params["perceptron_b"] = model.perceptron_b;
    params["svm_alpha"] = vec_to_json(model.svm_alpha);
    params["svm_b"] = model.svm_b;
    j["parameters"] = params;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path.string());
    out << j.dump(2) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path.string());
    const json j = json::parse(in);

    TrainedModel model;
    model.kind = classifier_from_string(j.at("kind").get<std::string>());
    const json& h = j.at("hyperparams");
    model.hyper.svm_c = h.at("svm_c").get<double>();
    model.hyper.svm_gamma = h.at("svm_gamma").get<double>();
    model.hyper.svm_tol = h.at("svm_tol").get<double>();
    model.hyper.knn_k = h.at("knn_k").get<int>();
    model.hyper.lda_ridge_scale = h.at("lda_ridge_scale").get<double>();
    model.hyper.perceptron_lr = h.at("perceptron_lr").get<double>();
    model.hyper.perceptron_max_epochs = h.at("perceptron_max_epochs").get<int>();

    const json& s = j.at("standardization");
    model.standardizer.mean = vec_from_json(s.at("mean"));
    model.standardizer.sd = vec_from_json(s.at("sd"));
    model.standardizer.zero_variance = s.at("zero_variance").get<std::vector<int>>();

    model.converged = j.at("converged").get<bool>();
    model.note = j.at("note").get<std::string>();

    const json& p = j.at("parameters");
    model.lda_w = vec_from_json(p.at("lda_w"));
    model.lda_b = p.at("lda_b").get<double>();
    model.mean_pos = vec_from_json(p.at("mean_pos"));
    model.mean_neg = vec_from_json(p.at("mean_neg"));
    model.train_x = mat_from_json(p.at("train_x"));
    model.train_y = p.at("train_y").get<std::vector<int>>();
    model.parzen_h_pos = p.at("parzen_h_pos").get<double>();
    model.parzen_h_neg = p.at("parzen_h_neg").get<double>();
    model.parzen_prior_pos = p.at("parzen_prior_pos").get<double>();
    model.perceptron_w = vec_from_json(p.at("perceptron_w"));
    model.perceptron_b = p.at("perceptron_b").get<double>();
    model.svm_alpha = vec_from_json(p.at("svm_alpha"));
    model.svm_b = p.at("svm_b").get<double>();
    return model;
}

} // namespace kqeeg
