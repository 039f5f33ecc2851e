#include <array>
#include <cmath>
#include <cstdio>
#include <utility>

#include "common.hpp"
#include "granulex/error.hpp"
#include "granulex/metadata.hpp"

namespace granulex {

namespace {

struct KindInfo {
    LearnerKind kind;
    const char* name;
    std::vector<std::pair<std::string, double>> defaults;
};

const std::vector<KindInfo>& kind_table() {
    static const std::vector<KindInfo> table = {
        {LearnerKind::knn, "knn", {{"k", 5}}},
        {LearnerKind::gaussian_naive_bayes, "gaussian-naive-bayes", {}},
        {LearnerKind::lda, "lda", {}},
        {LearnerKind::fisher, "fisher", {}},
        {LearnerKind::logistic_linear, "logistic-linear", {{"iterations", 500}, {"rate", 0.1}}},
        {LearnerKind::decision_tree, "decision-tree", {{"max_depth", 12}, {"min_leaf", 2}}},
        {LearnerKind::decision_stump, "decision-stump", {{"min_leaf", 1}}},
        {LearnerKind::nearest_mean, "nearest-mean", {}},
        {LearnerKind::perceptron, "perceptron", {{"iterations", 100}, {"rate", 1.0}}},
    };
    return table;
}

const KindInfo& info(LearnerKind kind) {
    for (const auto& k : kind_table())
        if (k.kind == kind) return k;
    throw Error("unknown learner kind");
}

std::string format_number(double v) {
    char buf[40];
    if (v == std::floor(v) && std::abs(v) < 1e15)
        std::snprintf(buf, sizeof buf, "%.0f", v);
    else
        return format_shortest(v);
    return buf;
}

bool is_integral_param(const std::string& key) {
    return key == "k" || key == "max_depth" || key == "min_leaf" || key == "iterations";
}

}  // namespace

std::string to_string(LearnerKind kind) { return info(kind).name; }

LearnerKind parse_learner_kind(std::string_view name) {
    for (const auto& k : kind_table())
        if (name == k.name) return k.kind;
    throw Error("unknown learner kind '" + std::string(name) + "'");
}

std::string LearnerSpec::id() const {
    const auto& defaults = info(kind).defaults;
    std::string out = to_string(kind);
    if (kind == LearnerKind::knn) out += format_number(params.count("k") ? params.at("k") : 5.0);
    for (const auto& [key, value] : params) {
        if (kind == LearnerKind::knn && key == "k") continue;
        bool is_default = false;
        for (const auto& [dkey, dvalue] : defaults)
            if (dkey == key && dvalue == value) is_default = true;
        if (!is_default) out += ":" + key + "=" + format_number(value);
    }
    return out;
}

LearnerSpec normalized(LearnerSpec spec) {
    const auto& kinfo = info(spec.kind);
    for (const auto& [key, value] : spec.params) {
        bool known = false;
        for (const auto& d : kinfo.defaults) known = known || d.first == key;
        if (!known) throw Error("learner '" + std::string(kinfo.name) + "' has no hyperparameter '" + key + "'");
        if (!std::isfinite(value)) throw Error("hyperparameter '" + key + "' must be finite");
        if (is_integral_param(key) && (value < 1 || value != std::floor(value)))
            throw Error("hyperparameter '" + key + "' must be an integer >= 1");
        if (key == "rate" && value <= 0) throw Error("hyperparameter 'rate' must be positive");
    }
    for (const auto& [key, value] : kinfo.defaults) spec.params.emplace(key, value);
    return spec;
}

LearnerSpec parse_learner_spec(std::string_view text) {
    LearnerSpec spec;
    const auto colon = text.find(':');
    spec.kind = parse_learner_kind(text.substr(0, colon));
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    while (!rest.empty()) {
        const auto next = rest.find(':');
        const auto item = rest.substr(0, next);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw Error("expected key=value in learner spec '" + std::string(text) + "'");
        const std::string value(item.substr(eq + 1));
        try {
            std::size_t used = 0;
            spec.params[std::string(item.substr(0, eq))] = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw Error("bad hyperparameter value '" + value + "' in learner spec");
        }
        rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next + 1);
    }
    return normalized(std::move(spec));
}

std::string format_learner_spec(const LearnerSpec& spec) {
    std::string out = to_string(spec.kind);
    for (const auto& [key, value] : spec.params) out += ":" + key + "=" + format_number(value);
    return out;
}

std::vector<LearnerSpec> default_roster() {
    auto knn = [](int k) { return normalized({LearnerKind::knn, {{"k", k}}}); };
    return {
        normalized({LearnerKind::lda, {}}),
        normalized({LearnerKind::gaussian_naive_bayes, {}}),
        knn(5),
        knn(25),
        knn(50),
        normalized({LearnerKind::decision_tree, {}}),
        normalized({LearnerKind::decision_stump, {}}),
        normalized({LearnerKind::fisher, {}}),
        normalized({LearnerKind::logistic_linear, {}}),
        normalized({LearnerKind::nearest_mean, {}}),
    };
}

std::vector<LearnerSpec> extended_roster() {
    auto roster = default_roster();
    roster.push_back(normalized({LearnerKind::perceptron, {}}));
    roster.push_back(normalized({LearnerKind::knn, {{"k", 75}}}));
    return roster;
}

namespace {

class BundledLearner final : public Learner {
public:
    explicit BundledLearner(LearnerSpec spec) : spec_(normalized(std::move(spec))) {}

    std::string id() const override { return spec_.id(); }
    std::optional<LearnerSpec> spec() const override { return spec_; }

    std::unique_ptr<Model> fit(const Dataset& data, std::uint64_t seed) const override {
        using namespace learners;
        if (data.size() == 0) throw Error("cannot fit " + id() + " on an empty dataset");
        if (!data.features.allFinite()) throw Error("cannot fit " + id() + " on non-finite features");
        switch (spec_.kind) {
            case LearnerKind::knn: return fit_knn(spec_, data);
            case LearnerKind::gaussian_naive_bayes: return fit_naive_bayes(spec_, data);
            case LearnerKind::lda: return fit_lda(spec_, data);
            case LearnerKind::fisher: return fit_fisher(spec_, data);
            case LearnerKind::logistic_linear: return fit_logistic(spec_, data);
            case LearnerKind::decision_tree: return fit_tree(spec_, data);
            case LearnerKind::decision_stump: {
                LearnerSpec stump{LearnerKind::decision_tree, {{"max_depth", 1}, {"min_leaf", spec_.param("min_leaf")}}};
                return fit_tree(stump, data);
            }
            case LearnerKind::nearest_mean: return fit_nearest_mean(spec_, data);
            case LearnerKind::perceptron: return fit_perceptron(spec_, data, seed);
        }
        throw Error("unknown learner kind");
    }

private:
    LearnerSpec spec_;
};

}  // namespace

std::shared_ptr<const Learner> make_learner(const LearnerSpec& spec) { return std::make_shared<BundledLearner>(spec); }

std::vector<std::shared_ptr<const Learner>> make_learners(const std::vector<LearnerSpec>& specs) {
    std::vector<std::shared_ptr<const Learner>> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(make_learner(s));
    return out;
}

std::unique_ptr<Model> restore_model(const LearnerSpec& spec, const nlohmann::json& state) {
    using namespace learners;
    switch (spec.kind) {
        case LearnerKind::knn: return restore_knn(state);
        case LearnerKind::gaussian_naive_bayes: return restore_naive_bayes(state);
        case LearnerKind::lda: return restore_lda(state);
        case LearnerKind::fisher: return restore_fisher(state);
        case LearnerKind::logistic_linear: return restore_logistic(state);
        case LearnerKind::decision_tree:
        case LearnerKind::decision_stump: return restore_tree(state);
        case LearnerKind::nearest_mean: return restore_nearest_mean(state);
        case LearnerKind::perceptron: return restore_perceptron(state);
    }
    throw Error("unknown learner kind");
}

FittedClassifier::FittedClassifier(std::string id, std::optional<LearnerSpec> spec, std::shared_ptr<const Model> model,
                                   ClassCatalog catalog)
    : id_(std::move(id)), spec_(std::move(spec)), model_(std::move(model)), catalog_(std::move(catalog)) {
    if (!model_) throw Error("classifier without a model");
    if (model_->classes() != catalog_.size()) throw Error("model class count does not match catalog");
}

Eigen::VectorXd FittedClassifier::predict_proba(const Eigen::VectorXd& x) const {
    if (x.size() != model_->dims())
        throw Error("dimension mismatch: expected " + std::to_string(model_->dims()) + " features, got " +
                    std::to_string(x.size()));
    if (!x.allFinite()) throw Error("non-finite feature value");
    Eigen::VectorXd p = model_->posterior(x);
    p = p.cwiseMax(0.0).cwiseMin(1.0);
    return p / p.sum();
}

Eigen::MatrixXd FittedClassifier::predict_proba_batch(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out(x.rows(), catalog_.size());
    for (Eigen::Index n = 0; n < x.rows(); ++n) out.row(n) = predict_proba(x.row(n).transpose()).transpose();
    return out;
}

FittedClassifier fit(const Learner& learner, const Dataset& data, std::uint64_t seed) {
    std::shared_ptr<const Model> model = learner.fit(data, seed);
    return {learner.id(), learner.spec(), std::move(model), data.catalog};
}

FittedClassifier fit(const LearnerSpec& spec, const Dataset& data, std::uint64_t seed) {
    return fit(*make_learner(spec), data, seed);
}

nlohmann::json to_json(const FittedClassifier& classifier) {
    if (!classifier.spec()) throw Error("classifier '" + classifier.id() + "' is not a bundled learner; cannot serialize");
    const auto& spec = *classifier.spec();
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : spec.params) params[k] = v;
    return {{"id", classifier.id()},
            {"kind", to_string(spec.kind)},
            {"params", std::move(params)},
            {"state", classifier.model().state()}};
}

FittedClassifier classifier_from_json(const nlohmann::json& j, const ClassCatalog& catalog) {
    LearnerSpec spec;
    spec.kind = parse_learner_kind(j.at("kind").get<std::string>());
    for (const auto& [k, v] : j.at("params").items()) spec.params[k] = v.get<double>();
    spec = normalized(std::move(spec));
    std::shared_ptr<const Model> model = restore_model(spec, j.at("state"));
    return {j.at("id").get<std::string>(), spec, std::move(model), catalog};
}

}  // namespace granulex
