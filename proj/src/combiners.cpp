#include "granulex/combiners.hpp"

#include <algorithm>
#include <cmath>

#include "granulex/error.hpp"

namespace granulex {

int argmax_lowest(const Eigen::VectorXd& values) {
    if (values.size() == 0) throw Error("argmax of an empty vector");
    int best = 0;
    for (int m = 1; m < values.size(); ++m)
        if (values(m) > values(best)) best = m;
    return best;
}

std::string to_string(FixedRule rule) {
    switch (rule) {
        case FixedRule::sum: return "sum";
        case FixedRule::product: return "product";
        case FixedRule::max: return "max";
        case FixedRule::min: return "min";
        case FixedRule::median: return "median";
        case FixedRule::majority_vote: return "vote";
    }
    throw Error("unknown fixed rule");
}

FixedRule parse_fixed_rule(std::string_view name) {
    for (FixedRule r : kAllFixedRules)
        if (name == to_string(r)) return r;
    if (name == "majority-vote") return FixedRule::majority_vote;
    throw Error("unknown fixed rule '" + std::string(name) + "'");
}

Decision fixed_rule_classify(const MetaProfile& profile, FixedRule rule) {
    const auto& s = profile.scores;
    if (s.rows() == 0 || s.cols() == 0) throw Error("empty profile");
    Eigen::VectorXd scores(s.cols());
    switch (rule) {
        // Sequential accumulation keeps each column's result independent of its position.
        case FixedRule::sum:
        case FixedRule::product:
            for (int m = 0; m < s.cols(); ++m) {
                double acc = rule == FixedRule::sum ? 0.0 : 1.0;
                for (int k = 0; k < s.rows(); ++k) acc = rule == FixedRule::sum ? acc + s(k, m) : acc * s(k, m);
                scores(m) = acc;
            }
            break;
        case FixedRule::max: scores = s.colwise().maxCoeff().transpose(); break;
        case FixedRule::min: scores = s.colwise().minCoeff().transpose(); break;
        case FixedRule::median:
            for (int m = 0; m < s.cols(); ++m) scores(m) = median_of(column_sample(profile, m));
            break;
        case FixedRule::majority_vote:
            scores.setZero();
            for (int k = 0; k < s.rows(); ++k) scores(argmax_lowest(s.row(k).transpose())) += 1.0;
            break;
    }
    return {{scores, to_string(rule)}, argmax_lowest(scores)};
}

DecisionTemplateModel dt_fit(const MetaMatrix& meta, std::span<const int> labels) {
    if (static_cast<int>(labels.size()) != meta.size()) throw Error("label count does not match meta-data rows");
    const int classes = meta.classes();
    DecisionTemplateModel model;
    model.templates.assign(static_cast<std::size_t>(classes), Eigen::MatrixXd::Zero(meta.classifiers(), classes));
    std::vector<int> counts(static_cast<std::size_t>(classes), 0);
    for (int n = 0; n < meta.size(); ++n) {
        const auto m = static_cast<std::size_t>(labels[static_cast<std::size_t>(n)]);
        if (m >= counts.size()) throw Error("label index out of range");
        model.templates[m] += meta[n].scores;
        ++counts[m];
    }
    for (std::size_t m = 0; m < counts.size(); ++m) {
        if (counts[m] == 0)
            throw Error("no training profile for class '" + meta.catalog().name(static_cast<int>(m)) + "'");
        model.templates[m] /= counts[m];
    }
    return model;
}

double s1_similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("shape mismatch between profile and template");
    const double intersection = a.cwiseMin(b).sum();
    const double union_ = a.cwiseMax(b).sum();
    if (union_ == 0.0) return 1.0;
    return intersection / union_;
}

Decision dt_classify(const DecisionTemplateModel& model, const MetaProfile& profile) {
    Eigen::VectorXd sims(static_cast<Eigen::Index>(model.templates.size()));
    for (std::size_t m = 0; m < model.templates.size(); ++m)
        sims(static_cast<Eigen::Index>(m)) = s1_similarity(profile.scores, model.templates[m]);
    return {{sims, "decision-template"}, argmax_lowest(sims)};
}

std::string to_string(HFunction h) {
    switch (h) {
        case HFunction::h1: return "h1";
        case HFunction::h2: return "h2";
        case HFunction::h3: return "h3";
    }
    throw Error("unknown h function");
}

HFunction parse_h_function(std::string_view name) {
    if (name == "h1") return HFunction::h1;
    if (name == "h2") return HFunction::h2;
    if (name == "h3") return HFunction::h3;
    throw Error("unknown h function '" + std::string(name) + "' (expected h1, h2 or h3)");
}

IntervalMemberships granular_intervals(const MetaProfile& profile, double alpha) {
    IntervalMemberships out;
    out.reserve(static_cast<std::size_t>(profile.classes()));
    for (int m = 0; m < profile.classes(); ++m) out.push_back(construct_granule(column_sample(profile, m), alpha));
    return out;
}

double ncm(const Granule<double>& interval, HFunction h) {
    const double length = std::abs(interval.upper - interval.lower);
    const double mid = interval.midpoint();
    switch (h) {
        case HFunction::h1: return mid;
        case HFunction::h2: return mid / std::max(length, kH2LengthFloor);
        case HFunction::h3: return mid * std::exp(-length);
    }
    throw Error("unknown h function");
}

Decision granular_classify(const IntervalMemberships& intervals, HFunction h) {
    Eigen::VectorXd values(static_cast<Eigen::Index>(intervals.size()));
    for (std::size_t m = 0; m < intervals.size(); ++m) values(static_cast<Eigen::Index>(m)) = ncm(intervals[m], h);
    return {{values, "granular-" + to_string(h)}, argmax_lowest(values)};
}

Decision granular_classify(const MetaProfile& profile, double alpha, HFunction h) {
    return granular_classify(granular_intervals(profile, alpha), h);
}

}  // namespace granulex
