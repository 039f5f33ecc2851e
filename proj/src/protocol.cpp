#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "granulex/error.hpp"
#include "granulex/evaluation.hpp"
#include "granulex/parallel.hpp"
#include "granulex/seed.hpp"

namespace granulex {

std::vector<std::string> default_method_names() {
    return {"learners", "sum", "product", "max", "min", "median", "vote",
            "decision-template", "granular-cv", "granular-fixed"};
}

std::vector<Method> resolve_methods(const std::vector<std::string>& names, const std::vector<LearnerSpec>& roster) {
    std::vector<Method> out;
    auto add_single = [&](int k) {
        out.push_back({Method::Kind::single, "learner:" + roster[static_cast<std::size_t>(k)].id(), k, FixedRule::sum});
    };
    for (const auto& name : names) {
        if (name == "learners") {
            for (int k = 0; k < static_cast<int>(roster.size()); ++k) add_single(k);
        } else if (name == "fixed-rules") {
            for (FixedRule r : kAllFixedRules) out.push_back({Method::Kind::fixed_rule, to_string(r), -1, r});
        } else if (name.rfind("learner:", 0) == 0) {
            const auto id = name.substr(8);
            int found = -1;
            for (int k = 0; k < static_cast<int>(roster.size()); ++k)
                if (roster[static_cast<std::size_t>(k)].id() == id) found = k;
            if (found < 0) throw Error("method '" + name + "' names a learner outside the roster");
            add_single(found);
        } else if (name == "decision-template") {
            out.push_back({Method::Kind::decision_template, name, -1, FixedRule::sum});
        } else if (name == "granular-cv") {
            out.push_back({Method::Kind::granular_cv, name, -1, FixedRule::sum});
        } else if (name == "granular-fixed") {
            out.push_back({Method::Kind::granular_fixed, name, -1, FixedRule::sum});
        } else {
            const FixedRule r = parse_fixed_rule(name);
            out.push_back({Method::Kind::fixed_rule, to_string(r), -1, r});
        }
    }
    std::set<std::string> seen;
    for (const auto& m : out)
        if (!seen.insert(m.name).second) throw Error("method '" + m.name + "' listed twice");
    if (out.empty()) throw Error("no methods configured");
    return out;
}

void validate(const ProtocolConfig& config) {
    if (config.folds < 2) throw Error("folds must be at least 2");
    if (config.repeats < 1) throw Error("repeats must be at least 1");
    if (config.inner_folds < 2) throw Error("inner folds must be at least 2");
    if (!(config.significance > 0.0 && config.significance < 1.0)) throw Error("significance must lie in (0, 1)");
    if (config.learners.size() < 2) throw Error("the roster needs at least 2 learners");
    if (!std::isfinite(config.fixed_alpha) || config.fixed_alpha < 0.0) throw Error("fixed alpha must be >= 0");
    resolve_methods(config.methods, config.learners);
}

void summarize(MethodResult& result) {
    auto stats = [](const std::vector<double>& v, double& mean, double& variance) {
        mean = v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        variance = 0.0;
        if (v.size() > 1) {
            for (double x : v) variance += (x - mean) * (x - mean);
            variance /= static_cast<double>(v.size() - 1);
        }
    };
    stats(result.errors, result.error_mean, result.error_variance);
    stats(result.f1, result.f1_mean, result.f1_variance);
}

namespace {

struct RunOutcome {
    std::vector<double> errors;  // per method
    std::vector<double> f1;
    double selected_alpha = 0.0;
    BiasVarianceReport granular_bv;
    BiasVarianceReport median_bv;
};

bool uses(const std::vector<Method>& methods, Method::Kind kind) {
    return std::any_of(methods.begin(), methods.end(), [&](const Method& m) { return m.kind == kind; });
}

int method_index(const std::vector<Method>& methods, const std::string& name) {
    for (std::size_t i = 0; i < methods.size(); ++i)
        if (methods[i].name == name) return static_cast<int>(i);
    return -1;
}

RunOutcome run_fold(const Dataset& data, const std::vector<std::size_t>& train_rows,
                    const std::vector<std::size_t>& test_rows, const std::vector<Method>& methods,
                    const ProtocolConfig& config, const std::vector<std::shared_ptr<const Learner>>& learners,
                    std::uint64_t seed) {
    const Dataset train = data.subset(train_rows);
    const Dataset test = data.subset(test_rows);
    const auto k_count = learners.size();

    std::vector<FittedClassifier> classifiers;
    for (std::size_t k = 0; k < k_count; ++k) classifiers.push_back(fit(*learners[k], train, derive_seed(seed, {0, k})));

    std::vector<MetaProfile> profiles;
    for (int n = 0; n < test.size(); ++n) profiles.push_back(profile_of(classifiers, test.features.row(n).transpose()));

    RunOutcome out;
    const bool need_meta = uses(methods, Method::Kind::granular_cv) || uses(methods, Method::Kind::decision_template);
    DecisionTemplateModel templates;
    if (need_meta) {
        const auto counts = train.class_counts();
        for (int m = 0; m < train.classes(); ++m)
            if (counts[static_cast<std::size_t>(m)] < config.inner_folds)
                throw Error("class '" + train.catalog.name(m) + "' has fewer training observations than inner folds");
        const FoldPlan inner = make_fold_plan(train.labels, train.classes(), config.inner_folds, derive_seed(seed, {1}));
        const MetaMatrix meta = generate_meta_cv(train, learners, inner, derive_seed(seed, {2}));
        if (uses(methods, Method::Kind::granular_cv))
            out.selected_alpha = select_alpha(meta, train.labels, config.grid, config.h).alpha;
        if (uses(methods, Method::Kind::decision_template)) templates = dt_fit(meta, train.labels);
    }

    std::vector<std::vector<int>> per_classifier(k_count, std::vector<int>(profiles.size()));
    for (std::size_t n = 0; n < profiles.size(); ++n)
        for (std::size_t k = 0; k < k_count; ++k)
            per_classifier[k][n] = argmax_lowest(profiles[n].scores.row(static_cast<Eigen::Index>(k)).transpose());

    std::vector<int> predictions(profiles.size());
    for (const auto& method : methods) {
        for (std::size_t n = 0; n < profiles.size(); ++n) {
            const auto& p = profiles[n];
            switch (method.kind) {
                case Method::Kind::single:
                    predictions[n] = per_classifier[static_cast<std::size_t>(method.learner)][n];
                    break;
                case Method::Kind::fixed_rule: predictions[n] = fixed_rule_classify(p, method.rule).label; break;
                case Method::Kind::decision_template: predictions[n] = dt_classify(templates, p).label; break;
                case Method::Kind::granular_cv:
                    predictions[n] = granular_classify(p, out.selected_alpha, config.h).label;
                    break;
                case Method::Kind::granular_fixed:
                    predictions[n] = granular_classify(p, config.fixed_alpha, config.h).label;
                    break;
            }
        }
        out.errors.push_back(error_rate(predictions, test.labels));
        out.f1.push_back(macro_f1(predictions, test.labels, test.classes()));
        if (method.kind == Method::Kind::granular_fixed)
            out.granular_bv = bias_variance(predictions, per_classifier, test.labels);
        if (method.kind == Method::Kind::fixed_rule && method.rule == FixedRule::median)
            out.median_bv = bias_variance(predictions, per_classifier, test.labels);
    }
    return out;
}

void accumulate_bv(BiasVarianceReport& total, const BiasVarianceReport& run) {
    total.run_bias.push_back(run.bias);
    total.run_variance.push_back(run.variance);
}

void finish_bv(BiasVarianceReport& bv) {
    const auto n = static_cast<double>(bv.run_bias.size());
    bv.bias = std::accumulate(bv.run_bias.begin(), bv.run_bias.end(), 0.0) / n;
    bv.variance = std::accumulate(bv.run_variance.begin(), bv.run_variance.end(), 0.0) / n;
}

}  // namespace

ExperimentReport run_protocol(const std::vector<Dataset>& datasets, const ProtocolConfig& config) {
    validate(config);
    if (datasets.empty()) throw Error("no datasets");
    const auto methods = resolve_methods(config.methods, config.learners);
    const auto learners = make_learners(config.learners);

    // Plans first: every method sees the same split of each (dataset, repeat).
    std::vector<std::vector<FoldPlan>> plans(datasets.size());
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        const auto& data = datasets[d];
        validate_dataset(data);
        const auto counts = data.class_counts();
        for (int m = 0; m < data.classes(); ++m)
            if (counts[static_cast<std::size_t>(m)] < config.folds)
                throw Error("dataset '" + data.name + "': class '" + data.catalog.name(m) +
                            "' has fewer observations than folds");
        for (int r = 0; r < config.repeats; ++r)
            plans[d].push_back(make_fold_plan(data.labels, data.classes(), config.folds,
                                              derive_seed(config.seed, {d, static_cast<std::size_t>(r), 0})));
    }

    const auto folds = static_cast<std::size_t>(config.folds);
    const auto repeats = static_cast<std::size_t>(config.repeats);
    const std::size_t per_dataset = folds * repeats;
    std::vector<RunOutcome> outcomes(datasets.size() * per_dataset);
    parallel_for(outcomes.size(), [&](std::size_t task) {
        const std::size_t d = task / per_dataset;
        const std::size_t r = (task % per_dataset) / folds;
        const std::size_t f = task % folds;
        const auto& plan = plans[d][r];
        try {
            outcomes[task] = run_fold(datasets[d], plan.train_rows(static_cast<int>(f)), plan.test_rows(static_cast<int>(f)),
                                      methods, config, learners, derive_seed(config.seed, {d, r, f + 1}));
        } catch (const Error& e) {
            throw Error("dataset '" + datasets[d].name + "': " + e.what());
        }
    });

    ExperimentReport report;
    report.folds = config.folds;
    report.repeats = config.repeats;
    for (const auto& m : methods) report.methods.push_back(m.name);

    const bool has_granular_fixed = uses(methods, Method::Kind::granular_fixed);
    const bool has_median = method_index(methods, "median") >= 0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        DatasetReport dr;
        dr.name = datasets[d].name;
        BiasVarianceReport granular_bv, median_bv;
        for (std::size_t i = 0; i < per_dataset; ++i) {
            const auto& run = outcomes[d * per_dataset + i];
            for (std::size_t j = 0; j < methods.size(); ++j) {
                auto& mr = dr.methods[methods[j].name];
                mr.errors.push_back(run.errors[j]);
                mr.f1.push_back(run.f1[j]);
            }
            if (uses(methods, Method::Kind::granular_cv)) dr.selected_alphas.push_back(run.selected_alpha);
            if (has_granular_fixed) accumulate_bv(granular_bv, run.granular_bv);
            if (has_median) accumulate_bv(median_bv, run.median_bv);
        }
        for (auto& [name, mr] : dr.methods) summarize(mr);
        if (has_granular_fixed) {
            finish_bv(granular_bv);
            dr.bias_variance["granular-fixed"] = std::move(granular_bv);
        }
        if (has_median) {
            finish_bv(median_bv);
            dr.bias_variance["median"] = std::move(median_bv);
        }
        report.datasets.push_back(std::move(dr));
    }

    // Granular methods against every other method, per dataset.
    for (const auto& g : methods) {
        if (g.kind != Method::Kind::granular_cv && g.kind != Method::Kind::granular_fixed) continue;
        for (const auto& o : methods) {
            if (o.name == g.name) continue;
            PairwiseComparison cmp;
            cmp.method = g.name;
            cmp.versus = o.name;
            for (const auto& dr : report.datasets) {
                const auto& a = dr.methods.at(g.name);
                const auto& b = dr.methods.at(o.name);
                auto e = wilcoxon_signed_rank(a.errors, b.errors, config.significance, Preference::lower);
                auto f = wilcoxon_signed_rank(a.f1, b.f1, config.significance, Preference::higher);
                (e.verdict == Verdict::a_better ? cmp.error_win : e.verdict == Verdict::b_better ? cmp.error_loss
                                                                                                 : cmp.error_equal)++;
                (f.verdict == Verdict::a_better ? cmp.f1_win : f.verdict == Verdict::b_better ? cmp.f1_loss
                                                                                              : cmp.f1_equal)++;
                cmp.error.push_back(e);
                cmp.f1.push_back(f);
            }
            report.comparisons.push_back(std::move(cmp));
        }
    }

    Eigen::MatrixXd error_table(static_cast<Eigen::Index>(methods.size()), static_cast<Eigen::Index>(datasets.size()));
    Eigen::MatrixXd f1_table(error_table.rows(), error_table.cols());
    for (std::size_t j = 0; j < methods.size(); ++j)
        for (std::size_t d = 0; d < datasets.size(); ++d) {
            const auto& mr = report.datasets[d].methods.at(methods[j].name);
            error_table(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(d)) = mr.error_mean;
            f1_table(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(d)) = -mr.f1_mean;
        }
    const Eigen::VectorXd er = average_ranks(error_table);
    const Eigen::VectorXd fr = average_ranks(f1_table);
    for (std::size_t j = 0; j < methods.size(); ++j) {
        report.error_rank[methods[j].name] = er(static_cast<Eigen::Index>(j));
        report.f1_rank[methods[j].name] = fr(static_cast<Eigen::Index>(j));
    }
    return report;
}

}  // namespace granulex
