#include "granulex/training.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "granulex/error.hpp"
#include "granulex/parallel.hpp"
#include "granulex/seed.hpp"

namespace granulex {

AlphaGrid::AlphaGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error("alpha grid is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0) throw Error("alpha grid values must be finite and >= 0");
        if (i > 0 && values_[i] <= values_[i - 1]) throw Error("alpha grid must be strictly increasing");
    }
}

AlphaGrid AlphaGrid::standard() { return parse("0:0.1:4"); }

AlphaGrid AlphaGrid::parse(std::string_view text) {
    std::vector<double> parts;
    std::string_view rest = text;
    while (true) {
        const auto colon = rest.find(':');
        const std::string item(rest.substr(0, colon));
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error("bad alpha grid '" + std::string(text) + "' (expected lo:step:hi)");
        }
        if (colon == std::string_view::npos) break;
        rest = rest.substr(colon + 1);
    }
    if (parts.size() == 1) return AlphaGrid({parts[0]});
    if (parts.size() != 3) throw Error("bad alpha grid '" + std::string(text) + "' (expected lo:step:hi)");
    const double lo = parts[0], step = parts[1], hi = parts[2];
    if (!(step > 0.0) || hi < lo) throw Error("bad alpha grid '" + std::string(text) + "'");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> values;
    values.reserve(count);
    // Snap to 12 decimals so 0.1 * 3 is stored as 0.3.
    for (std::size_t i = 0; i < count; ++i) values.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    return AlphaGrid(std::move(values));
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t n = 0; n < assignments.size(); ++n)
        if (assignments[n] != fold) rows.push_back(n);
    return rows;
}

std::vector<std::size_t> FoldPlan::test_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t n = 0; n < assignments.size(); ++n)
        if (assignments[n] == fold) rows.push_back(n);
    return rows;
}

FoldPlan make_fold_plan(std::span<const int> labels, int classes, int folds, std::uint64_t seed) {
    if (folds < 2) throw Error("fold count must be at least 2");
    if (labels.size() < static_cast<std::size_t>(folds)) throw Error("fewer observations than folds");
    std::mt19937_64 rng(seed);
    FoldPlan plan{std::vector<int>(labels.size(), -1), folds, seed};
    std::size_t position = 0;
    for (int m = 0; m < classes; ++m) {
        std::vector<std::size_t> members;
        for (std::size_t n = 0; n < labels.size(); ++n)
            if (labels[n] == m) members.push_back(n);
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t n : members) plan.assignments[n] = static_cast<int>(position++ % static_cast<std::size_t>(folds));
    }
    for (int a : plan.assignments)
        if (a < 0) throw Error("label index out of range in fold plan");
    return plan;
}

MetaMatrix generate_meta_cv(const Dataset& data, const std::vector<std::shared_ptr<const Learner>>& learners,
                            const FoldPlan& plan, std::uint64_t seed) {
    if (learners.empty()) throw Error("no base learners");
    if (plan.assignments.size() != static_cast<std::size_t>(data.size())) throw Error("fold plan does not match dataset");
    const int folds = plan.folds;
    const int classes = data.classes();
    const auto k_count = learners.size();

    std::vector<Dataset> training(static_cast<std::size_t>(folds));
    std::vector<std::vector<std::size_t>> held_out(static_cast<std::size_t>(folds));
    for (int t = 0; t < folds; ++t) {
        const auto rows = plan.train_rows(t);
        training[static_cast<std::size_t>(t)] = data.subset(rows);
        held_out[static_cast<std::size_t>(t)] = plan.test_rows(t);
        const auto counts = training[static_cast<std::size_t>(t)].class_counts();
        for (int m = 0; m < classes; ++m)
            if (counts[static_cast<std::size_t>(m)] == 0)
                throw Error("fold " + std::to_string(t) + " training part has no observation of class '" +
                            data.catalog.name(m) + "'");
    }

    std::vector<Eigen::MatrixXd> scores(static_cast<std::size_t>(data.size()),
                                        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k_count), classes));
    // Each (fold, learner) task writes row k of the profiles of its held-out rows only.
    parallel_for(static_cast<std::size_t>(folds) * k_count, [&](std::size_t task) {
        const auto t = task / k_count;
        const auto k = task % k_count;
        if (held_out[t].empty()) return;
        const FittedClassifier clf = fit(*learners[k], training[t], derive_seed(seed, {t, k}));
        for (std::size_t n : held_out[t])
            scores[n].row(static_cast<Eigen::Index>(k)) =
                clf.predict_proba(data.features.row(static_cast<Eigen::Index>(n)).transpose()).transpose();
    });

    std::vector<std::string> ids;
    for (const auto& l : learners) ids.push_back(l->id());
    std::vector<MetaProfile> rows;
    rows.reserve(scores.size());
    for (auto& s : scores) {
        rows.emplace_back(std::move(s), ids);
        require_valid(rows.back());
    }
    return MetaMatrix(std::move(rows), data.catalog);
}

MetaMatrix generate_meta_cv(const Dataset& data, const std::vector<LearnerSpec>& specs, const FoldPlan& plan,
                            std::uint64_t seed) {
    return generate_meta_cv(data, make_learners(specs), plan, seed);
}

double error_for_alpha(const MetaMatrix& meta, std::span<const int> labels, double alpha, HFunction h) {
    if (static_cast<int>(labels.size()) != meta.size()) throw Error("label count does not match meta-data rows");
    if (meta.size() == 0) throw Error("empty meta-data");
    int wrong = 0;
    for (int n = 0; n < meta.size(); ++n)
        if (granular_classify(meta[n], alpha, h).label != labels[static_cast<std::size_t>(n)]) ++wrong;
    return static_cast<double>(wrong) / meta.size();
}

AlphaSelection select_alpha(const MetaMatrix& meta, std::span<const int> labels, const AlphaGrid& grid, HFunction h) {
    const auto& values = grid.values();
    std::vector<double> errors(values.size());
    parallel_for(values.size(), [&](std::size_t i) { errors[i] = error_for_alpha(meta, labels, values[i], h); });

    AlphaSelection out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.curve.emplace_back(values[i], errors[i]);
        if (errors[i] < errors[best]) best = i;
    }
    out.alpha = values[best];
    return out;
}

int TrainedEnsemble::dims() const { return classifiers.empty() ? 0 : classifiers.front().model().dims(); }

AlphaSelection cross_validated_alpha(const Dataset& data, const std::vector<std::shared_ptr<const Learner>>& learners,
                                     const AlphaGrid& grid, HFunction h, int folds, std::uint64_t seed) {
    validate_dataset(data);
    if (folds < 2) throw Error("fold count must be at least 2");
    const auto counts = data.class_counts();
    for (int m = 0; m < data.classes(); ++m)
        if (counts[static_cast<std::size_t>(m)] < folds)
            throw Error("class '" + data.catalog.name(m) + "' has fewer observations than folds");
    const FoldPlan plan = make_fold_plan(data.labels, data.classes(), folds, derive_seed(seed, {1}));
    const MetaMatrix meta = generate_meta_cv(data, learners, plan, derive_seed(seed, {2}));
    return select_alpha(meta, data.labels, grid, h);
}

TrainedEnsemble train(const Dataset& data, const std::vector<std::shared_ptr<const Learner>>& learners,
                      const TrainOptions& options) {
    validate_dataset(data);
    if (learners.size() < 2) throw Error("the ensemble needs at least 2 base learners");

    TrainedEnsemble ensemble;
    ensemble.h = options.h;
    ensemble.catalog = data.catalog;

    if (const auto* fixed = std::get_if<double>(&options.alpha)) {
        if (!std::isfinite(*fixed) || *fixed < 0.0) throw Error("fixed alpha must be finite and >= 0");
        ensemble.alpha = *fixed;
    } else {
        auto selection =
            cross_validated_alpha(data, learners, std::get<AlphaGrid>(options.alpha), options.h, options.folds, options.seed);
        ensemble.alpha = selection.alpha;
        ensemble.alpha_error_curve = std::move(selection.curve);
    }

    ensemble.classifiers.resize(learners.size());
    parallel_for(learners.size(), [&](std::size_t k) {
        ensemble.classifiers[k] = fit(*learners[k], data, derive_seed(options.seed, {3, k}));
    });
    return ensemble;
}

TrainedEnsemble train(const Dataset& data, const std::vector<LearnerSpec>& specs, const TrainOptions& options) {
    return train(data, make_learners(specs), options);
}

MetaProfile profile_of(const std::vector<FittedClassifier>& classifiers, const Eigen::VectorXd& x) {
    if (classifiers.empty()) throw Error("no classifiers");
    Eigen::MatrixXd scores(static_cast<Eigen::Index>(classifiers.size()), classifiers.front().catalog().size());
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < classifiers.size(); ++k) {
        scores.row(static_cast<Eigen::Index>(k)) = classifiers[k].predict_proba(x).transpose();
        ids.push_back(classifiers[k].id());
    }
    MetaProfile profile(std::move(scores), std::move(ids));
    require_valid(profile);
    return profile;
}

Prediction predict(const TrainedEnsemble& ensemble, const Eigen::VectorXd& x) {
    Prediction out;
    out.profile = profile_of(ensemble.classifiers, x);
    out.intervals = granular_intervals(out.profile, ensemble.alpha);
    auto decision = granular_classify(out.intervals, ensemble.h);
    out.membership = std::move(decision.membership);
    out.label = decision.label;
    return out;
}

std::vector<Prediction> predict(const TrainedEnsemble& ensemble, const Eigen::MatrixXd& x) {
    std::vector<Prediction> out(static_cast<std::size_t>(x.rows()));
    parallel_for(out.size(), [&](std::size_t n) {
        out[n] = predict(ensemble, Eigen::VectorXd(x.row(static_cast<Eigen::Index>(n)).transpose()));
    });
    return out;
}

nlohmann::json to_json(const TrainedEnsemble& ensemble) {
    nlohmann::json classifiers = nlohmann::json::array();
    for (const auto& c : ensemble.classifiers) classifiers.push_back(to_json(c));
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [a, e] : ensemble.alpha_error_curve) curve.push_back({a, e});
    return {{"format", "granulex-ensemble"},
            {"version", kEnsembleFormatVersion},
            {"catalog", ensemble.catalog.labels()},
            {"alpha", ensemble.alpha},
            {"h", to_string(ensemble.h)},
            {"alpha_error_curve", std::move(curve)},
            {"classifiers", std::move(classifiers)}};
}

TrainedEnsemble ensemble_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "granulex-ensemble") throw Error("not a granulex ensemble archive");
    if (j.at("version").get<int>() != kEnsembleFormatVersion)
        throw Error("unsupported ensemble format version " + j.at("version").dump());
    TrainedEnsemble ensemble;
    ensemble.catalog = ClassCatalog(j.at("catalog").get<std::vector<std::string>>());
    ensemble.alpha = j.at("alpha").get<double>();
    ensemble.h = parse_h_function(j.at("h").get<std::string>());
    for (const auto& point : j.at("alpha_error_curve"))
        ensemble.alpha_error_curve.emplace_back(point.at(0).get<double>(), point.at(1).get<double>());
    for (const auto& c : j.at("classifiers")) ensemble.classifiers.push_back(classifier_from_json(c, ensemble.catalog));
    if (ensemble.classifiers.size() < 2) throw Error("ensemble archive has fewer than 2 classifiers");
    return ensemble;
}

}  // namespace granulex
