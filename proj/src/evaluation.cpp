#include "granulex/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "granulex/error.hpp"

namespace granulex {

namespace {

void check_pair(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size()) throw Error("prediction and truth lengths differ");
    if (predictions.empty()) throw Error("no predictions");
}

/// Midranks (1-based) of the values, ascending.
std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j + 2);
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double error_rate(std::span<const int> predictions, std::span<const int> truth) {
    check_pair(predictions, truth);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += predictions[i] != truth[i];
    return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double macro_f1(std::span<const int> predictions, std::span<const int> truth, int classes) {
    check_pair(predictions, truth);
    if (classes < 1) throw Error("class count must be positive");
    std::vector<double> tp(static_cast<std::size_t>(classes)), fp(tp.size()), fn(tp.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto p = static_cast<std::size_t>(predictions[i]);
        const auto t = static_cast<std::size_t>(truth[i]);
        if (p >= tp.size() || t >= tp.size()) throw Error("class index out of range");
        if (p == t) {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn[t] += 1;
        }
    }
    double total = 0.0;
    for (std::size_t m = 0; m < tp.size(); ++m) {
        const double precision = tp[m] + fp[m] > 0 ? tp[m] / (tp[m] + fp[m]) : 0.0;
        const double recall = tp[m] + fn[m] > 0 ? tp[m] / (tp[m] + fn[m]) : 0.0;
        if (precision + recall > 0) total += 2.0 * precision * recall / (precision + recall);
    }
    return total / classes;
}

BiasVarianceReport bias_variance(std::span<const int> final_labels, const std::vector<std::vector<int>>& per_classifier,
                                 std::span<const int> truth) {
    if (final_labels.size() != truth.size()) throw Error("final predictions and truth lengths differ");
    if (truth.empty()) throw Error("bias/variance needs at least one observation");
    if (per_classifier.empty()) throw Error("bias/variance needs at least one base classifier");
    std::size_t wrong = 0, disagreements = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += final_labels[i] != truth[i];
    for (const auto& h : per_classifier) {
        if (h.size() != truth.size()) throw Error("base classifier predictions have the wrong length");
        for (std::size_t i = 0; i < truth.size(); ++i) disagreements += final_labels[i] != h[i];
    }
    BiasVarianceReport out;
    const auto s = static_cast<double>(truth.size());
    out.bias = static_cast<double>(wrong) / s;
    out.variance = static_cast<double>(disagreements) / (s * static_cast<double>(per_classifier.size()));
    out.run_bias = {out.bias};
    out.run_variance = {out.variance};
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::a_better: return "a-better";
        case Verdict::b_better: return "b-better";
        case Verdict::equal: return "equal";
    }
    return "equal";
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double significance,
                                    Preference better) {
    if (a.size() != b.size()) throw Error("paired samples differ in length");
    if (!(significance > 0.0 && significance < 1.0)) throw Error("significance must lie in (0, 1)");

    std::vector<double> magnitude;
    std::vector<int> sign;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d == 0.0) continue;
        magnitude.push_back(std::abs(d));
        sign.push_back(d > 0 ? 1 : -1);
    }

    WilcoxonResult out;
    out.n = static_cast<int>(magnitude.size());
    const auto ranks = midranks(magnitude);
    for (std::size_t i = 0; i < ranks.size(); ++i) (sign[i] > 0 ? out.w_plus : out.w_minus) += ranks[i];
    if (out.n < kWilcoxonMinPairs) {
        out.insufficient = true;
        out.p_value = 1.0;
        out.verdict = Verdict::equal;
        return out;
    }

    const double w_min = std::min(out.w_plus, out.w_minus);
    if (out.n <= kWilcoxonExactLimit) {
        // Doubled midranks are integers; count sign assignments by subset-sum.
        std::vector<int> doubled(ranks.size());
        int total = 0;
        for (std::size_t i = 0; i < ranks.size(); ++i) total += doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
        std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
        ways[0] = 1.0;
        for (int r : doubled)
            for (int s = total; s >= r; --s) ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r)];
        const auto limit = static_cast<int>(std::lround(2.0 * w_min));
        double tail = 0.0;
        for (int s = 0; s <= limit; ++s) tail += ways[static_cast<std::size_t>(s)];
        out.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, out.n));
        out.exact = true;
    } else {
        const double n = out.n;
        double tie_term = 0.0;
        auto sorted = ranks;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
        const double mean = n * (n + 1) / 4.0;
        const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
        const double z = std::max(0.0, std::abs(out.w_plus - mean) - 0.5) / std::sqrt(var);
        out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
        out.exact = false;
    }

    if (out.p_value < significance && out.w_plus != out.w_minus) {
        const bool a_larger = out.w_plus > out.w_minus;
        out.verdict = (a_larger == (better == Preference::higher)) ? Verdict::a_better : Verdict::b_better;
    }
    return out;
}

Eigen::VectorXd average_ranks(const Eigen::MatrixXd& table) {
    if (table.rows() == 0 || table.cols() == 0) throw Error("empty ranking table");
    if (!table.allFinite()) throw Error("ranking table has missing cells");
    Eigen::VectorXd total = Eigen::VectorXd::Zero(table.rows());
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
        const Eigen::VectorXd column = table.col(c);
        const auto ranks = midranks(std::span<const double>(column.data(), static_cast<std::size_t>(column.size())));
        for (Eigen::Index r = 0; r < table.rows(); ++r) total(r) += ranks[static_cast<std::size_t>(r)];
    }
    return total / static_cast<double>(table.cols());
}

}  // namespace granulex
