#pragma once

// Experimental protocol: repeated stratified k-fold cross-validation of base
// learners, fixed rules, Decision Template and the granular combiner, with
// error rate, macro-F1, Wilcoxon signed-rank comparisons, average rankings
// and 0-1 loss bias/variance.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "granulex/combiners.hpp"
#include "granulex/dataset.hpp"
#include "granulex/learners.hpp"
#include "granulex/training.hpp"

namespace granulex {

double error_rate(std::span<const int> predictions, std::span<const int> truth);

/// One-vs-rest F1 per class averaged over all `classes`; a class with
/// precision + recall = 0 contributes 0.
double macro_f1(std::span<const int> predictions, std::span<const int> truth, int classes);

struct BiasVarianceReport {
    double bias = 0.0;
    double variance = 0.0;
    std::vector<double> run_bias;
    std::vector<double> run_variance;
};

/// bias = #(final != truth) / |S|;
/// variance = #{(x, k) : final(x) != per_classifier[k](x)} / (|S| K).
BiasVarianceReport bias_variance(std::span<const int> final_labels, const std::vector<std::vector<int>>& per_classifier,
                                 std::span<const int> truth);

enum class Verdict { a_better, b_better, equal };
std::string to_string(Verdict v);

/// Which direction of the paired values counts as better.
enum class Preference { higher, lower };

struct WilcoxonResult {
    Verdict verdict = Verdict::equal;
    double p_value = 1.0;
    double w_plus = 0.0;
    double w_minus = 0.0;
    int n = 0;               // pairs left after dropping zero differences
    bool exact = true;       // exact null distribution vs normal approximation
    bool insufficient = false;  // fewer than 5 nonzero differences
};

inline constexpr int kWilcoxonExactLimit = 25;
inline constexpr int kWilcoxonMinPairs = 5;

/// Two-sided signed-rank test on d = a - b. Zero differences are dropped and
/// tied magnitudes get midranks. Up to 25 pairs the p-value comes from the
/// exact permutation distribution of W+; beyond that from the normal
/// approximation with tie and continuity corrections.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double significance,
                                    Preference better = Preference::higher);

/// `table` is methods x datasets, lower is better. Within each dataset
/// methods are ranked 1..P with midranks for ties; returns the mean rank
/// per method.
Eigen::VectorXd average_ranks(const Eigen::MatrixXd& table);

/// A method descriptor: "learner:<id>", one of the fixed rule names,
/// "decision-template", "granular-cv" or "granular-fixed".
struct Method {
    enum class Kind { single, fixed_rule, decision_template, granular_cv, granular_fixed };
    Kind kind = Kind::single;
    std::string name;
    int learner = -1;  // index into the roster for Kind::single
    FixedRule rule = FixedRule::sum;
};

/// Expands "learners" to every roster member and "fixed-rules" to all six
/// rules; duplicates are rejected.
std::vector<Method> resolve_methods(const std::vector<std::string>& names, const std::vector<LearnerSpec>& roster);

std::vector<std::string> default_method_names();

struct ProtocolConfig {
    int folds = 10;
    int repeats = 10;
    std::uint64_t seed = 0;
    std::vector<std::string> methods = default_method_names();
    double significance = 0.05;
    std::vector<LearnerSpec> learners = default_roster();
    AlphaGrid grid = AlphaGrid::standard();
    double fixed_alpha = 1.0;
    HFunction h = HFunction::h3;
    int inner_folds = 10;
};

void validate(const ProtocolConfig& config);

struct MethodResult {
    std::vector<double> errors;  // one per (repeat, fold), repeat-major
    std::vector<double> f1;
    double error_mean = 0.0;
    double error_variance = 0.0;
    double f1_mean = 0.0;
    double f1_variance = 0.0;
};

/// Fills means and sample variances from the per-run values.
void summarize(MethodResult& result);

struct DatasetReport {
    std::string name;
    std::map<std::string, MethodResult> methods;
    std::map<std::string, BiasVarianceReport> bias_variance;  // granular-fixed and median
    std::vector<double> selected_alphas;                       // granular-cv, one per run
};

struct PairwiseComparison {
    std::string method;  // the granular method
    std::string versus;
    std::vector<WilcoxonResult> error;  // one per dataset
    std::vector<WilcoxonResult> f1;
    int error_win = 0, error_equal = 0, error_loss = 0;
    int f1_win = 0, f1_equal = 0, f1_loss = 0;
};

struct ExperimentReport {
    std::vector<std::string> methods;
    std::vector<DatasetReport> datasets;
    std::vector<PairwiseComparison> comparisons;
    std::map<std::string, double> error_rank;
    std::map<std::string, double> f1_rank;
    int folds = 0;
    int repeats = 0;
};

ExperimentReport run_protocol(const std::vector<Dataset>& datasets, const ProtocolConfig& config);

}  // namespace granulex
