#include "kqeeg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace kqeeg {

std::string to_string(TestMethod m) {
    switch (m) {
        case TestMethod::RankSumExact: return "rank_sum_exact";
        case TestMethod::RankSumNormal: return "rank_sum_normal";
        case TestMethod::SignedRankExact: return "signed_rank_exact";
        case TestMethod::SignedRankNormal: return "signed_rank_normal";
    }
    return "?";
}

std::string to_string(Alternative a) {
    switch (a) {
        case Alternative::TwoSided: return "two_sided";
        case Alternative::Less: return "less";
        case Alternative::Greater: return "greater";
    }
    return "?";
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double two_sided(double p_less, double p_greater) {
    return std::min(1.0, 2.0 * std::min(p_less, p_greater));
}

// Mid-ranks of the pooled sample; also reports the tie-correction term
// sum(t^3 - t) over tie groups and whether any tie exists.
struct Ranked {
    std::vector<double> ranks;
    double tie_term = 0.0;
    bool has_ties = false;
};

Ranked midranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    Ranked out;
    out.ranks.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) {
            out.has_ties = true;
            out.tie_term += t * t * t - t;
        }
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = mid;
        i = j + 1;
    }
    return out;
}

// Number of size-k subsets of ranks {1..n} with each possible rank sum.
// count[k][s] built by the standard subset-sum recurrence.
std::vector<std::vector<double>> ranksum_counts(int n, int k) {
    const int max_sum = n * (n + 1) / 2;
    std::vector<std::vector<double>> count(
        static_cast<std::size_t>(k) + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    count[0][0] = 1.0;
    for (int item = 1; item <= n; ++item) {
        for (int kk = std::min(k, item); kk >= 1; --kk) {
            for (int s = max_sum; s >= item; --s) {
                count[static_cast<std::size_t>(kk)][static_cast<std::size_t>(s)] +=
                    count[static_cast<std::size_t>(kk - 1)][static_cast<std::size_t>(s - item)];
            }
        }
    }
    return count;
}

} // namespace

TestResult wilcoxon_rank_sum(Eigen::Ref<const Eigen::VectorXd> x,
                             Eigen::Ref<const Eigen::VectorXd> y, Alternative alt,
                             int exact_limit) {
    const int n1 = static_cast<int>(x.size());
    const int n2 = static_cast<int>(y.size());
    if (n1 < 1 || n2 < 1) throw EmptySample("both samples must be nonempty");
    if (!x.allFinite() || !y.allFinite()) throw EmptySample("samples must be finite");

    std::vector<double> pooled(static_cast<std::size_t>(n1 + n2));
    for (int i = 0; i < n1; ++i) pooled[static_cast<std::size_t>(i)] = x[i];
    for (int i = 0; i < n2; ++i) pooled[static_cast<std::size_t>(n1 + i)] = y[i];
    const Ranked ranked = midranks(pooled);

    double w = 0.0;
    for (int i = 0; i < n1; ++i) w += ranked.ranks[static_cast<std::size_t>(i)];

    TestResult res;
    res.statistic = w;
    res.n1 = n1;
    res.n2 = n2;

    const int n = n1 + n2;
    if (!ranked.has_ties && n <= exact_limit) {
        // Exact: P(W <= w) and P(W >= w) from the subset-sum table.
        const auto count = ranksum_counts(n, n1);
        const auto& row = count[static_cast<std::size_t>(n1)];
        double total = 0.0, below = 0.0, above = 0.0;
        const int iw = static_cast<int>(std::lround(w));
        for (int s = 0; s < static_cast<int>(row.size()); ++s) {
            total += row[static_cast<std::size_t>(s)];
            if (s <= iw) below += row[static_cast<std::size_t>(s)];
            if (s >= iw) above += row[static_cast<std::size_t>(s)];
        }
        const double p_less = below / total;
        const double p_greater = above / total;
        res.method = TestMethod::RankSumExact;
        switch (alt) {
            case Alternative::Less: res.p_value = p_less; break;
            case Alternative::Greater: res.p_value = p_greater; break;
            case Alternative::TwoSided: res.p_value = two_sided(p_less, p_greater); break;
        }
        return res;
    }

    // Normal approximation with tie correction and continuity correction.
    const double dn1 = n1, dn2 = n2, dn = n;
    const double mu = dn1 * (dn + 1.0) / 2.0;
    double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - ranked.tie_term / (dn * (dn - 1.0)));
    var = std::max(var, 0.0);
    res.method = TestMethod::RankSumNormal;
    if (var == 0.0) {
        res.p_value = 1.0;
        return res;
    }
    const double sd = std::sqrt(var);
    const double p_less = normal_cdf((w - mu + 0.5) / sd);
    const double p_greater = 1.0 - normal_cdf((w - mu - 0.5) / sd);
    switch (alt) {
        case Alternative::Less: res.p_value = std::min(1.0, p_less); break;
        case Alternative::Greater: res.p_value = std::min(1.0, p_greater); break;
        case Alternative::TwoSided: res.p_value = two_sided(p_less, p_greater); break;
    }
    return res;
}

TestResult wilcoxon_signed_rank(Eigen::Ref<const Eigen::VectorXd> before,
                                Eigen::Ref<const Eigen::VectorXd> after, Alternative alt,
                                int exact_limit) {
    if (before.size() != after.size()) {
        throw LengthMismatch("before and after must have equal lengths");
    }
    if (before.size() < 1) throw EmptySample("need at least one pair");
    if (!before.allFinite() || !after.allFinite()) throw EmptySample("samples must be finite");

    std::vector<double> abs_d;
    std::vector<int> sign;
    for (Eigen::Index i = 0; i < before.size(); ++i) {
        const double d = after[i] - before[i];
        if (d == 0.0) continue; // Wilcoxon convention: drop zero differences
        abs_d.push_back(std::abs(d));
        sign.push_back(d > 0.0 ? 1 : -1);
    }
    const int n = static_cast<int>(abs_d.size());
    if (n == 0) throw AllZeroDifferences("every paired difference is zero");

    const Ranked ranked = midranks(abs_d);
    double w_plus = 0.0;
    for (int i = 0; i < n; ++i) {
        if (sign[static_cast<std::size_t>(i)] > 0) w_plus += ranked.ranks[static_cast<std::size_t>(i)];
    }

    TestResult res;
    res.statistic = w_plus;
    res.n1 = n;
    res.n2 = n;

    if (n <= exact_limit) {
        // Sign-flip enumeration remains exact under tied magnitudes when the
        // statistic uses mid-ranks; the subset-sum table runs on doubled
        // ranks so half-integer mid-ranks become integers.
        std::vector<int> ranks2(static_cast<std::size_t>(n));
        int max_sum = 0;
        for (int i = 0; i < n; ++i) {
            ranks2[static_cast<std::size_t>(i)] =
                static_cast<int>(std::lround(2.0 * ranked.ranks[static_cast<std::size_t>(i)]));
            max_sum += ranks2[static_cast<std::size_t>(i)];
        }
        std::vector<double> ways(static_cast<std::size_t>(max_sum) + 1, 0.0);
        ways[0] = 1.0;
        for (const int item : ranks2) {
            for (int s = max_sum; s >= item; --s) {
                ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - item)];
            }
        }
        const double total = std::pow(2.0, n);
        const int iw = static_cast<int>(std::lround(2.0 * w_plus));
        double below = 0.0, above = 0.0;
        for (int s = 0; s < static_cast<int>(ways.size()); ++s) {
            if (s <= iw) below += ways[static_cast<std::size_t>(s)];
            if (s >= iw) above += ways[static_cast<std::size_t>(s)];
        }
        const double p_less = below / total;
        const double p_greater = above / total;
        res.method = TestMethod::SignedRankExact;
        switch (alt) {
            case Alternative::Less: res.p_value = p_less; break;
            case Alternative::Greater: res.p_value = p_greater; break;
            case Alternative::TwoSided: res.p_value = two_sided(p_less, p_greater); break;
        }
        return res;
    }

    const double dn = n;
    const double mu = dn * (dn + 1.0) / 4.0;
    double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - ranked.tie_term / 48.0;
    var = std::max(var, 0.0);
    res.method = TestMethod::SignedRankNormal;
    if (var == 0.0) {
        res.p_value = 1.0;
        return res;
    }
    const double sd = std::sqrt(var);
    const double p_less = normal_cdf((w_plus - mu + 0.5) / sd);
    const double p_greater = 1.0 - normal_cdf((w_plus - mu - 0.5) / sd);
    switch (alt) {
        case Alternative::Less: res.p_value = std::min(1.0, p_less); break;
        case Alternative::Greater: res.p_value = std::min(1.0, p_greater); break;
        case Alternative::TwoSided: res.p_value = two_sided(p_less, p_greater); break;
    }
    return res;
}

AdjustedResults hochberg_adjust(const std::vector<double>& p_values, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw InvalidPValue("alpha must be in (0, 1)");
    for (double p : p_values) {
        if (!(p >= 0.0) || !(p <= 1.0)) {
            throw InvalidPValue("p-value out of [0, 1]: " + std::to_string(p));
        }
    }

    AdjustedResults out;
    out.raw_p = p_values;
    out.alpha = alpha;
    out.reject.assign(p_values.size(), false);
    const int m = static_cast<int>(p_values.size());
    if (m == 0) return out;

    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return p_values[static_cast<std::size_t>(a)] < p_values[static_cast<std::size_t>(b)]; });

    int k = 0; // largest index (1-based) with p(k) <= alpha / (m - k + 1)
    for (int i = m; i >= 1; --i) {
        const double p = p_values[static_cast<std::size_t>(order[static_cast<std::size_t>(i - 1)])];
        if (p <= alpha / static_cast<double>(m - i + 1)) {
            k = i;
            break;
        }
    }
    for (int i = 0; i < k; ++i) {
        out.reject[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;
    }
    out.n_rejected = k;
    return out;
}

std::vector<ComparisonOutcome> group_compare(const std::vector<Comparison>& comparisons,
                                             double alpha, double secondary_alpha,
                                             int min_per_group) {
    std::vector<ComparisonOutcome> outcomes(comparisons.size());
    std::vector<double> family_p;
    std::vector<std::size_t> family_idx;

    for (std::size_t i = 0; i < comparisons.size(); ++i) {
        const Comparison& c = comparisons[i];
        ComparisonOutcome& o = outcomes[i];
        o.feature = c.feature;
        o.groups = c.groups;
        o.paired = c.paired;
        try {
            if (c.paired) {
                if (c.x.size() != c.y.size()) throw LengthMismatch("paired lengths differ");
                if (c.x.size() < min_per_group) throw EmptySample("insufficient pairs");
                o.result = wilcoxon_signed_rank(c.x, c.y, c.alt);
            } else {
                if (c.x.size() < min_per_group || c.y.size() < min_per_group) {
                    throw EmptySample("insufficient group size");
                }
                o.result = wilcoxon_rank_sum(c.x, c.y, c.alt);
            }
            family_p.push_back(o.result.p_value);
            family_idx.push_back(i);
        } catch (const Error& e) {
            o.skipped = true;
            o.note = e.what();
        }
    }

    if (!family_p.empty()) {
        const AdjustedResults primary = hochberg_adjust(family_p, alpha);
        const AdjustedResults secondary = hochberg_adjust(family_p, secondary_alpha);
        for (std::size_t j = 0; j < family_idx.size(); ++j) {
            outcomes[family_idx[j]].reject_primary = primary.reject[j];
            outcomes[family_idx[j]].reject_secondary = secondary.reject[j];
        }
    }
    return outcomes;
}

} // namespace kqeeg
