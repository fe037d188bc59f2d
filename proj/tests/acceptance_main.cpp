// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria run against the same library entry points as the CLI.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include "kqeeg/clinical.hpp"
#include "kqeeg/features.hpp"
#include "kqeeg/filter.hpp"
#include "kqeeg/ml.hpp"
#include "kqeeg/rng.hpp"
#include "kqeeg/stats.hpp"
#include "kqeeg/study.hpp"
#include "kqeeg/synth.hpp"
#include "kqeeg/welch.hpp"

using namespace kqeeg;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("[%s] C%d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::ArrayXd sinusoid(double f_hz, double fs_hz, double seconds) {
    const Eigen::Index n = static_cast<Eigen::Index>(seconds * fs_hz);
    const Eigen::ArrayXd t =
        Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / fs_hz;
    return (2.0 * std::numbers::pi * f_hz * t).sin();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// C1: spectral correctness

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::ArrayXd x = sinusoid(8.0, 512.0, 60.0);
    const PowerSpectrum psd = welch_psd(x, 512.0);
    const double elapsed = seconds_since(t0);

    Eigen::Index argmax = 0;
    psd.power.maxCoeff(&argmax);
    const bool peak_ok = psd.freqs_hz[argmax] == 8.0;
    const double total = psd.power.sum();
    const bool parseval_ok = std::abs(total - 0.5) <= 0.05 * 0.5;
    const bool time_ok = elapsed < 1.0;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "welch sinusoid: peak at %.1f Hz, sum %.4f (target 0.5), %.2fs",
                  psd.freqs_hz[argmax], total, elapsed);
    report(1, peak_ok && parseval_ok && time_ok, buf);
}

// ---------------------------------------------------------------------------
// C2: filter contract

void criterion_2() {
    const FilterKernel kernel = design_bandpass_fir(1.0, 12.0, 512.0, 1024);

    const Eigen::ArrayXd in_band = sinusoid(6.0, 512.0, 4.0);
    const Eigen::ArrayXd out6 = filter_zero_phase(in_band, kernel);
    const double rms_in = std::sqrt(in_band.square().mean());
    const double loss_db = -20.0 * std::log10(std::sqrt(out6.square().mean()) / rms_in);

    const Eigen::ArrayXd hum = sinusoid(50.0, 512.0, 4.0);
    const Eigen::ArrayXd out50 = filter_zero_phase(hum, kernel);
    const double atten_db = -20.0 * std::log10(std::sqrt(out50.square().mean()) /
                                               std::sqrt(hum.square().mean()));

    // Cross-correlation peak lag of the in-band sinusoid must be exactly 0.
    Eigen::Index best_lag = 0;
    double best = -1.0;
    for (Eigen::Index lag = -64; lag <= 64; ++lag) {
        double sum = 0.0;
        for (Eigen::Index i = std::max<Eigen::Index>(0, -lag);
             i < in_band.size() && i + lag < in_band.size(); ++i) {
            sum += in_band[i] * out6[i + lag];
        }
        if (sum > best) {
            best = sum;
            best_lag = lag;
        }
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "zero-phase bandpass: 6 Hz loss %.3f dB, 50 Hz atten %.1f dB, lag %ld",
                  loss_db, atten_db, static_cast<long>(best_lag));
    report(2, loss_db < 1.0 && atten_db > 20.0 && best_lag == 0, buf);
}

// ---------------------------------------------------------------------------
// C3: feature equation oracles

void criterion_3() {
    bool ok = true;

    PowerSpectrum flat;
    flat.freqs_hz = Eigen::ArrayXd::LinSpaced(27, 0.0, 13.0);
    flat.power = Eigen::ArrayXd::Constant(27, 1.0);
    flat.scale = PowerScale::Linear;
    flat.fs_hz = 512.0;
    flat.params.nfft = 1024;
    const BandPowers bp = relative_power(flat);
    ok &= std::abs(bp.rel(Band::Theta) - 8.0 / 23.0) < 1e-9;

    BandPowers manual;
    manual.channel = kFp1;
    manual.absolute << 4.0, 2.0, 1.0, 1.0;
    manual.total_power = 8.0;
    manual.relative = manual.absolute / manual.total_power;
    const auto values = cordance(manual);
    const std::array<double, 4> expected{1.0, 0.0, -0.5, -0.5};
    for (int b = 0; b < kNumBands; ++b) {
        ok &= std::abs(values[static_cast<std::size_t>(b)].value -
                       expected[static_cast<std::size_t>(b)]) < 1e-9;
    }

    BandPowers left;
    left.channel = kFp1;
    left.absolute << 1.0, 1.0, 2.0, 1.0;
    left.total_power = 5.0;
    left.relative = left.absolute / left.total_power;
    BandPowers right = left;
    right.channel = kFp2;
    const AsymmetryScore score = alpha_asymmetry(left, right, Band::LowAlpha);
    ok &= score.value == 0.0;

    report(3, ok, "relative power 8/23, cordance [1, 0, -0.5, -0.5], symmetric asymmetry 0");
}

// ---------------------------------------------------------------------------
// C4: exact test oracles

double oracle_rank_sum_p(const std::vector<double>& x, const std::vector<double>& y,
                         Alternative alt) {
    const int n1 = static_cast<int>(x.size());
    const int n = n1 + static_cast<int>(y.size());
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::vector<int> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return pooled[static_cast<std::size_t>(a)] < pooled[static_cast<std::size_t>(b)];
    });
    std::vector<double> rank(pooled.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[static_cast<std::size_t>(order[i])] = static_cast<double>(i + 1);
    }
    double w_obs = 0.0;
    for (int i = 0; i < n1; ++i) w_obs += rank[static_cast<std::size_t>(i)];

    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    std::fill(mask.begin(), mask.begin() + n1, true);
    std::sort(mask.begin(), mask.end());
    long total = 0, below = 0, above = 0;
    do {
        double w = 0.0;
        for (int i = 0; i < n; ++i) {
            if (mask[static_cast<std::size_t>(i)]) w += i + 1;
        }
        ++total;
        if (w <= w_obs + 1e-9) ++below;
        if (w >= w_obs - 1e-9) ++above;
    } while (std::next_permutation(mask.begin(), mask.end()));
    const double p_less = static_cast<double>(below) / total;
    const double p_greater = static_cast<double>(above) / total;
    if (alt == Alternative::Less) return p_less;
    if (alt == Alternative::Greater) return p_greater;
    return std::min(1.0, 2.0 * std::min(p_less, p_greater));
}

double oracle_signed_rank_p(const std::vector<double>& before, const std::vector<double>& after,
                            Alternative alt) {
    std::vector<double> abs_d;
    std::vector<int> sign;
    for (std::size_t i = 0; i < before.size(); ++i) {
        const double d = after[i] - before[i];
        if (d == 0.0) continue;
        abs_d.push_back(std::abs(d));
        sign.push_back(d > 0.0 ? 1 : -1);
    }
    const int n = static_cast<int>(abs_d.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return abs_d[static_cast<std::size_t>(a)] < abs_d[static_cast<std::size_t>(b)];
    });
    std::vector<double> rank(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[static_cast<std::size_t>(order[i])] = static_cast<double>(i + 1);
    }
    double w_obs = 0.0;
    for (int i = 0; i < n; ++i) {
        if (sign[static_cast<std::size_t>(i)] > 0) w_obs += rank[static_cast<std::size_t>(i)];
    }
    long below = 0, above = 0;
    const long patterns = 1L << n;
    for (long p = 0; p < patterns; ++p) {
        double w = 0.0;
        for (int i = 0; i < n; ++i) {
            if (p & (1L << i)) w += rank[static_cast<std::size_t>(i)];
        }
        if (w <= w_obs + 1e-9) ++below;
        if (w >= w_obs - 1e-9) ++above;
    }
    const double p_less = static_cast<double>(below) / patterns;
    const double p_greater = static_cast<double>(above) / patterns;
    if (alt == Alternative::Less) return p_less;
    if (alt == Alternative::Greater) return p_greater;
    return std::min(1.0, 2.0 * std::min(p_less, p_greater));
}

void criterion_4() {
    Rng rng(404);
    int bad = 0;
    const auto to_vec = [](const std::vector<double>& v) {
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    };
    const std::array<Alternative, 3> alts{Alternative::TwoSided, Alternative::Less,
                                          Alternative::Greater};

    for (int trial = 0; trial < 500; ++trial) {
        const int n1 = 1 + static_cast<int>(rng.below(5));
        const int n2 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(10 - n1)));
        std::vector<double> x, y;
        for (int i = 0; i < n1; ++i) x.push_back(rng.uniform(0.0, 100.0));
        for (int i = 0; i < n2; ++i) y.push_back(rng.uniform(0.0, 100.0));
        const Alternative alt = alts[trial % 3];
        const TestResult r = wilcoxon_rank_sum(to_vec(x), to_vec(y), alt);
        if (r.method != TestMethod::RankSumExact ||
            std::abs(r.p_value - oracle_rank_sum_p(x, y, alt)) > 1e-12) {
            ++bad;
        }
    }
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(10));
        std::vector<double> before, after;
        for (int i = 0; i < n; ++i) {
            before.push_back(rng.uniform(0.0, 100.0));
            after.push_back(before.back() + rng.uniform(-10.0, 10.0));
        }
        const Alternative alt = alts[trial % 3];
        const TestResult r = wilcoxon_signed_rank(to_vec(before), to_vec(after), alt);
        if (r.method != TestMethod::SignedRankExact ||
            std::abs(r.p_value - oracle_signed_rank_p(before, after, alt)) > 1e-12) {
            ++bad;
        }
    }

    int hochberg_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = 1 + static_cast<int>(rng.below(15));
        std::vector<double> p;
        for (int i = 0; i < m; ++i) p.push_back(rng.uniform());
        const AdjustedResults res = hochberg_adjust(p, 0.05);
        std::vector<double> sorted = p;
        std::sort(sorted.begin(), sorted.end());
        int k = 0;
        for (int i = m; i >= 1; --i) {
            if (sorted[static_cast<std::size_t>(i - 1)] <= 0.05 / (m - i + 1)) {
                k = i;
                break;
            }
        }
        const double cutoff = k == 0 ? -1.0 : sorted[static_cast<std::size_t>(k - 1)];
        for (int i = 0; i < m; ++i) {
            if (res.reject[static_cast<std::size_t>(i)] !=
                (p[static_cast<std::size_t>(i)] <= cutoff)) {
                ++hochberg_bad;
            }
        }
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "exact wilcoxon vs enumeration (1000 cases): %d mismatches; hochberg: %d",
                  bad, hochberg_bad);
    report(4, bad == 0 && hochberg_bad == 0, buf);
}

// ---------------------------------------------------------------------------
// C5: classifier oracles

void criterion_5() {
    bool ok = true;
    std::string detail;

    Rng rng(505);
    Dataset blobs;
    blobs.x.resize(20, 2);
    for (int i = 0; i < 10; ++i) {
        blobs.x(i, 0) = -5.0 + rng.normal(0.0, 0.5);
        blobs.x(i, 1) = -5.0 + rng.normal(0.0, 0.5);
        blobs.y.push_back(0);
        blobs.x(10 + i, 0) = 5.0 + rng.normal(0.0, 0.5);
        blobs.x(10 + i, 1) = 5.0 + rng.normal(0.0, 0.5);
    }
    for (int i = 0; i < 10; ++i) blobs.y.push_back(1);

    const auto accuracy = [](const TrainedModel& m, const Dataset& d) {
        int correct = 0;
        for (Eigen::Index i = 0; i < d.rows(); ++i) {
            if (predict(m, d.x.row(i).transpose()) == d.y[static_cast<std::size_t>(i)]) ++correct;
        }
        return 100.0 * correct / static_cast<double>(d.rows());
    };

    for (const ClassifierKind kind : kAllClassifiers) {
        const double acc = accuracy(train(kind, blobs, {}, 1), blobs);
        if (acc != 100.0) {
            ok = false;
            detail += to_string(kind) + " blobs " + std::to_string(acc) + "%; ";
        }
    }

    Dataset xor_d;
    xor_d.x.resize(4, 2);
    xor_d.x << 0, 0, 1, 1, 0, 1, 1, 0;
    xor_d.y = {0, 0, 1, 1};
    const double svm_xor = accuracy(train(ClassifierKind::SvmRbf, xor_d, {}, 1), xor_d);
    const double pla_xor = accuracy(train(ClassifierKind::Perceptron, xor_d, {}, 1), xor_d);
    ok &= svm_xor == 100.0;
    ok &= pla_xor <= 75.0;

    Dataset six;
    six.x.resize(6, 2);
    six.x << 0, 0, 0, 1, 1, 0, 3, 3, 3, 4, 4, 3;
    six.y = {0, 0, 0, 1, 1, 1};
    const TrainedModel knn = train(ClassifierKind::Knn3, six);
    const TrainedModel nmsc = train(ClassifierKind::Nmsc, six);
    Eigen::Vector2d probe_lo(0.3, 0.3), probe_hi(3.2, 3.3), left(1.0, 1.0), right(3.0, 3.0);
    ok &= predict(knn, probe_lo) == 0 && predict(knn, probe_hi) == 1;
    ok &= predict(nmsc, left) == 0 && predict(nmsc, right) == 1;

    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "blobs 100%% all kinds; svm xor %.0f%%, perceptron xor %.0f%%; "
                  "knn3/nmsc fixed-point predictions %s",
                  svm_xor, pla_xor, detail.empty() ? "ok" : detail.c_str());
    report(5, ok, buf);
}

// ---------------------------------------------------------------------------
// C6: pipeline fidelity on a strong-effect synthetic cohort

StudyConfig acceptance_config(const fs::path& out_dir, std::uint64_t seed) {
    StudyConfig config = default_config();
    config.out_dir = out_dir;
    config.seed = seed;
    config.simulate.base.duration_s = 20.0;
    config.simulate.theta_deficit = 0.5;
    config.simulate.post_alpha_gain = 1.5;
    config.validation.min_seconds = 1.0;
    return config;
}

void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = fs::temp_directory_path() / "kqeeg_acceptance" / "c6";
    fs::remove_all(dir);
    fs::create_directories(dir);

    StudyConfig config = acceptance_config(dir, 606);
    bool ok = true;
    std::string detail;

    ok &= run_simulate(config) == 0;
    ok &= run_features(config) == 0;
    ok &= run_stats(config) == 0;
    ok &= run_predict(config) == 0;

    const FeatureTable table = load_feature_table(config.features_path());
    const Manifest manifest = load_manifest(config.manifest_path());
    const auto records = load_cohort_csv(manifest.cohort_csv);
    const StatsReport stats = compute_stats(table, records, config);

    // (a) responder-vs-non-responder theta flagged at baseline
    bool theta_flagged = false;
    for (const auto& o : stats.baseline_power) {
        if (o.feature.rfind("rel_theta_", 0) == 0) theta_flagged |= o.reject_primary;
    }
    ok &= theta_flagged;
    if (!theta_flagged) detail += "baseline theta not flagged; ";

    // (b) responder low-alpha increase and cordance decrease baseline -> post
    const auto paired_mean_shift = [&](const std::string& feature) {
        std::map<std::string, double> baseline, post;
        for (const auto& row : table.rows) {
            if (row.label != ResponseLabel::Responder) continue;
            if (row.group == TrialArm::C_Saline) continue;
            (row.session == Session::Baseline ? baseline : post)[row.subject_id] =
                table.value(row, feature);
        }
        double shift = 0.0;
        int n = 0;
        for (const auto& [sid, b] : baseline) {
            const auto it = post.find(sid);
            if (it == post.end()) continue;
            shift += it->second - b;
            ++n;
        }
        return shift / std::max(1, n);
    };

    bool alpha_up = false, cordance_down = false;
    for (const auto& o : stats.paired) {
        if (o.groups.rfind("active:", 0) != 0 || !o.reject_primary) continue;
        if (o.feature.rfind("rel_low_alpha_", 0) == 0 && paired_mean_shift(o.feature) > 0.0) {
            alpha_up = true;
        }
        if (o.feature.rfind("cordance_theta_", 0) == 0 && paired_mean_shift(o.feature) < 0.0) {
            cordance_down = true;
        }
    }
    ok &= alpha_up;
    ok &= cordance_down;
    if (!alpha_up) detail += "low-alpha increase not flagged; ";
    if (!cordance_down) detail += "cordance decrease not flagged; ";

    // (c) theta+low-alpha SVM-RBF three-fold accuracy over 10 seeds
    const Dataset data = dataset_from_table(table, FeatureSet::ThetaLowAlpha,
                                            {TrialArm::A_Ket05, TrialArm::B_Ket02});
    double mean_acc = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        mean_acc +=
            three_fold_cv(data, ClassifierKind::SvmRbf, config.predict.hyper, seed, 10)
                .mean_of("accuracy");
    }
    mean_acc /= 10.0;
    ok &= mean_acc >= 75.0;

    const double elapsed = seconds_since(t0);
    ok &= elapsed < 120.0;

    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "pipeline: theta flagged %d, alpha-up %d, cordance-down %d, "
                  "svm theta+low-alpha %.1f%% (>= 75), %.0fs (< 120) %s",
                  theta_flagged, alpha_up, cordance_down, mean_acc, elapsed, detail.c_str());
    report(6, ok, buf);
}

// ---------------------------------------------------------------------------
// C7: null control

void criterion_7() {
    StudyConfig config = default_config();
    config.simulate.base.duration_s = 8.0;
    config.simulate.theta_deficit = 1.0;
    config.simulate.alpha_deficit = 1.0;
    config.simulate.post_alpha_gain = 1.0;
    config.simulate.include_post = false;

    int flagged_seeds = 0;
    double acc_sum = 0.0;
    const int n_seeds = 50;

    for (int seed = 0; seed < n_seeds; ++seed) {
        CohortSpec spec = config.simulate;
        spec.seed = static_cast<std::uint64_t>(seed);
        spec.responder_threshold = config.responder.threshold;
        const auto cohort = gen_cohort(spec);

        FeatureTable table;
        table.feature_names = feature_column_names();
        for (const auto& subject : cohort) {
            table.rows.push_back(extract_row(subject.baseline, subject.record.label, config));
        }

        std::vector<SubjectRecord> records;
        for (const auto& subject : cohort) records.push_back(subject.record);
        const StatsReport stats = compute_stats(table, records, config);
        bool any = false;
        for (const auto& o : stats.baseline_power) any |= o.reject_primary;
        if (any) ++flagged_seeds;

        const Dataset data = dataset_from_table(table, FeatureSet::ThetaLowAlpha,
                                                {TrialArm::A_Ket05, TrialArm::B_Ket02});
        acc_sum += three_fold_cv(data, ClassifierKind::SvmRbf, config.predict.hyper,
                                 static_cast<std::uint64_t>(seed), 3)
                       .mean_of("accuracy");
    }

    const double mean_acc = acc_sum / n_seeds;
    const bool chance_ok = mean_acc >= 35.0 && mean_acc <= 65.0;
    // Family-wise rate: true rate <= 0.05 means P(more than 6 of 50) < 1%.
    const bool fwer_ok = flagged_seeds <= 6;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "null cohort: mean accuracy %.1f%% (chance band 35-65), "
                  "family-wise rejections %d/50 (binomial bound 6)",
                  mean_acc, flagged_seeds);
    report(7, chance_ok && fwer_ok, buf);
}

// ---------------------------------------------------------------------------
// C8: responder labeling

void criterion_8() {
    const auto series = [](double t0, double t240) {
        HdrsSeries s;
        s.set(Timepoint::T0, t0);
        s.set(Timepoint::T240, t240);
        return s;
    };
    const bool boundary = label_responder(series(20, 11)) == ResponseLabel::Responder;
    const bool exemplar = label_responder(series(22.4, 10.6)) == ResponseLabel::Responder;
    const bool non = label_responder(series(24.8, 20.8)) == ResponseLabel::NonResponder;
    report(8, boundary && exemplar && non,
           "labels: 20->11 responder (inclusive 45%), 22.4->10.6 responder, "
           "24.8->20.8 non-responder");
}

// ---------------------------------------------------------------------------
// C9: byte-level determinism

void criterion_9() {
    const auto dir = fs::temp_directory_path() / "kqeeg_acceptance" / "c9";

    StudyConfig config = acceptance_config(dir, 909);
    config.simulate.base.duration_s = 4.0;
    config.simulate.n_per_group = {{TrialArm::A_Ket05, 5},
                                   {TrialArm::B_Ket02, 5},
                                   {TrialArm::C_Saline, 4}};
    config.simulate.responder_fraction = {{TrialArm::A_Ket05, 0.4},
                                          {TrialArm::B_Ket02, 0.4},
                                          {TrialArm::C_Saline, 0.25}};
    config.predict.repeats = 2;
    config.predict.kinds = {ClassifierKind::Nmsc, ClassifierKind::SvmRbf};

    const auto run_chain = [&config] {
        return run_simulate(config) == 0 && run_features(config) == 0 &&
               run_stats(config) == 0 && run_predict(config) == 0;
    };

    // First run, snapshot every output byte, then rerun from scratch with the
    // identical config and seed.
    fs::remove_all(dir);
    fs::create_directories(dir);
    bool ok = run_chain();
    std::map<std::string, std::string> snapshot;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        snapshot[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
    }

    fs::remove_all(dir);
    fs::create_directories(dir);
    ok &= run_chain();

    int mismatches = 0;
    int compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir).string();
        ++compared;
        const auto it = snapshot.find(rel);
        if (it == snapshot.end() || it->second != slurp(entry.path())) ++mismatches;
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "re-running every subcommand: %d files compared, %d byte mismatches",
                  compared, mismatches);
    report(9, ok && compared == static_cast<int>(snapshot.size()) && compared > 0 &&
                  mismatches == 0,
           buf);
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();

    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
