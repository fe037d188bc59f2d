#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kqeeg/errors.hpp"

namespace kqeeg {

struct EmptySample : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct AllZeroDifferences : Error {
    using Error::Error;
};

struct InvalidPValue : Error {
    using Error::Error;
};

enum class Alternative { TwoSided, Less, Greater };

enum class TestMethod { RankSumExact, RankSumNormal, SignedRankExact, SignedRankNormal };

std::string to_string(TestMethod m);
std::string to_string(Alternative a);

struct TestResult {
    double statistic = 0.0; // rank-sum W of x, or signed-rank W+
    double p_value = 1.0;
    TestMethod method = TestMethod::RankSumNormal;
    int n1 = 0;
    int n2 = 0;
};

// Two-sample Wilcoxon rank-sum. The alternative refers to x: "less" means x
// tends smaller than y. Exact null distribution when n1 + n2 <= exact_limit
// and there are no ties; otherwise normal approximation with mid-ranks, tie
// correction and continuity correction. Two-sided p = 2 * min(one-sided),
// capped at 1.
TestResult wilcoxon_rank_sum(Eigen::Ref<const Eigen::VectorXd> x,
                             Eigen::Ref<const Eigen::VectorXd> y,
                             Alternative alt = Alternative::TwoSided, int exact_limit = 20);

// Paired Wilcoxon signed-rank on differences after - before; zero differences
// are dropped. "greater" means after tends larger than before. Exact when the
// retained pair count is <= exact_limit and |differences| are tie-free.
TestResult wilcoxon_signed_rank(Eigen::Ref<const Eigen::VectorXd> before,
                                Eigen::Ref<const Eigen::VectorXd> after,
                                Alternative alt = Alternative::TwoSided, int exact_limit = 20);

struct AdjustedResults {
    std::vector<double> raw_p;  // original order
    std::vector<bool> reject;   // original order
    double alpha = 0.05;
    int n_rejected = 0;
};

// Hochberg step-up: with ascending p(1..m), reject hypotheses 1..k for the
// largest k with p(k) <= alpha / (m - k + 1).
AdjustedResults hochberg_adjust(const std::vector<double>& p_values, double alpha = 0.05);

struct Comparison {
    std::string feature;
    std::string groups; // human-readable contrast, e.g. "resp_vs_nonresp/A"
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    bool paired = false;
    Alternative alt = Alternative::TwoSided;
};

struct ComparisonOutcome {
    std::string feature;
    std::string groups;
    bool paired = false;
    TestResult result;
    bool reject_primary = false;   // Hochberg at alpha
    bool reject_secondary = false; // Hochberg at the secondary level
    bool skipped = false;
    std::string note;
};

// Runs every comparison, then applies Hochberg jointly over the family at the
// primary and secondary levels. Comparisons with insufficient samples are
// reported as skipped, not fatal.
std::vector<ComparisonOutcome> group_compare(const std::vector<Comparison>& comparisons,
                                             double alpha = 0.05, double secondary_alpha = 0.025,
                                             int min_per_group = 2);

} // namespace kqeeg
