#include <doctest.h>

#include <random>

#include "granulex/learners.hpp"
#include "granulex/metadata.hpp"
#include "granulex/workbench.hpp"

using namespace granulex;

namespace {

Dataset make_data(std::vector<std::vector<double>> rows, std::vector<int> labels, int classes = 2) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    std::vector<std::string> names;
    for (int m = 0; m < classes; ++m) names.push_back(std::string(1, static_cast<char>('A' + m)));
    return Dataset(x, std::move(labels), ClassCatalog(names), "toy");
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

double training_error(const FittedClassifier& clf, const Dataset& data) {
    const Eigen::MatrixXd p = clf.predict_proba_batch(data.features);
    int wrong = 0;
    for (int n = 0; n < data.size(); ++n) {
        Eigen::Index best;
        p.row(n).maxCoeff(&best);
        wrong += static_cast<int>(best) != data.labels[static_cast<std::size_t>(n)];
    }
    return static_cast<double>(wrong) / data.size();
}

}  // namespace

TEST_CASE("learner specs") {
    CHECK(parse_learner_spec("knn:k=25").id() == "knn25");
    CHECK(parse_learner_spec("knn").id() == "knn5");
    CHECK(parse_learner_spec("decision-tree").id() == "decision-tree");
    CHECK(parse_learner_spec("decision-tree:max_depth=4").id() == "decision-tree:max_depth=4");
    CHECK(parse_learner_spec("logistic-linear:rate=0.05").id() == "logistic-linear:rate=0.05");
    CHECK(format_learner_spec(parse_learner_spec("knn:k=50")) == "knn:k=50");
    CHECK(parse_learner_spec(format_learner_spec(parse_learner_spec("perceptron:iterations=7"))) ==
          parse_learner_spec("perceptron:iterations=7"));
    CHECK_THROWS(parse_learner_spec("svm"));
    CHECK_THROWS(parse_learner_spec("knn:k=0"));
    CHECK_THROWS(parse_learner_spec("knn:depth=3"));
    CHECK_THROWS(parse_learner_spec("decision-tree:max_depth=0"));
    CHECK_THROWS(parse_learner_spec("logistic-linear:iterations=0"));
    CHECK_THROWS(parse_learner_spec("knn:k=abc"));

    const auto roster = default_roster();
    REQUIRE(roster.size() == 10);
    std::vector<std::string> ids;
    for (const auto& s : roster) ids.push_back(s.id());
    CHECK(ids == std::vector<std::string>{"lda", "gaussian-naive-bayes", "knn5", "knn25", "knn50", "decision-tree",
                                          "decision-stump", "fisher", "logistic-linear", "nearest-mean"});
    const auto extended = extended_roster();
    REQUIRE(extended.size() == 12);
    CHECK(extended[10].id() == "perceptron");
    CHECK(extended[11].id() == "knn75");
}

TEST_CASE("nearest mean") {
    const auto data = make_data({{0, 0}, {10, 10}}, {0, 1});
    const auto clf = fit(parse_learner_spec("nearest-mean"), data, 0);
    const auto state = clf.model().state();
    CHECK(state["means"]["data"] == nlohmann::json({0.0, 0.0, 10.0, 10.0}));
    const auto p = clf.predict_proba(vec({0, 0}));
    CHECK(p(0) > p(1));
    CHECK(p.sum() == doctest::Approx(1.0));
}

TEST_CASE("knn") {
    SUBCASE("k=1 memorizes") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> g;
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (int n = 0; n < 40; ++n) {
            rows.push_back({g(rng), g(rng)});
            labels.push_back(n % 2);
        }
        const auto data = make_data(rows, labels);
        const auto clf = fit(parse_learner_spec("knn:k=1"), data, 0);
        for (int n = 0; n < data.size(); ++n) {
            const auto p = clf.predict_proba(data.features.row(n).transpose());
            CHECK(p(data.labels[static_cast<std::size_t>(n)]) == 1.0);
        }
    }
    SUBCASE("vote fractions") {
        const auto data = make_data({{0}, {1}, {2}, {10}, {11}}, {0, 0, 1, 1, 1});
        const auto p = fit(parse_learner_spec("knn:k=3"), data, 0).predict_proba(vec({0.4}));
        CHECK(p(0) == doctest::Approx(2.0 / 3.0));
        CHECK(p(1) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("exact match takes all the mass") {
        const auto data = make_data({{0}, {1}, {2}}, {0, 1, 1});
        const auto p = fit(parse_learner_spec("knn:k=3"), data, 0).predict_proba(vec({0}));
        CHECK(p(0) == 1.0);
    }
    SUBCASE("distance ties resolved by observation order") {
        // Query at 1 is equidistant from 0 (class A) and 2 (class B).
        const auto data = make_data({{0}, {2}, {9}}, {0, 1, 1});
        const auto p = fit(parse_learner_spec("knn:k=1"), data, 0).predict_proba(vec({1}));
        CHECK(p(0) == 1.0);
    }
}

TEST_CASE("naive Bayes is symmetric on mirrored data") {
    const auto data = make_data({{-2, -1}, {-1, -2}, {-1.5, -1.5}, {2, 1}, {1, 2}, {1.5, 1.5}}, {0, 0, 0, 1, 1, 1});
    const auto p = fit(parse_learner_spec("gaussian-naive-bayes"), data, 0).predict_proba(vec({0, 0}));
    CHECK(p(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("decision stump leaf proportions") {
    // Left of the split: nine A and one B; right: ten B.
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (double v : {0, 1, 1, 2, 2, 3, 3, 4, 4}) {
        rows.push_back({v});
        labels.push_back(0);
    }
    rows.push_back({0});
    labels.push_back(1);
    for (int v = 6; v <= 15; ++v) {
        rows.push_back({static_cast<double>(v)});
        labels.push_back(1);
    }
    const auto data = make_data(rows, labels);
    const auto clf = fit(parse_learner_spec("decision-stump"), data, 0);
    const auto p = clf.predict_proba(vec({1}));
    CHECK(p(0) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(p(1) == doctest::Approx(0.1).epsilon(1e-15));
    const auto q = clf.predict_proba(vec({12}));
    CHECK(q(1) == 1.0);
}

TEST_CASE("classes absent from the training data get zero") {
    const auto full = make_data({{0}, {1}, {5}, {6}, {10}, {11}}, {0, 0, 1, 1, 2, 2}, 3);
    const std::vector<std::size_t> rows{0, 1, 2, 3};
    const auto part = full.subset(rows);
    for (const auto& spec : extended_roster()) {
        const auto p = fit(spec, part, 1).predict_proba(vec({0.5}));
        CAPTURE(spec.id());
        CHECK(p(2) == 0.0);
        CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("every learner fits two Gaussians with a 4 sigma separation") {
    GeneratorSpec gs;
    gs.n = 200;
    gs.d = 2;
    gs.seed = 3;
    const auto data = generate(gs);
    for (const auto& spec : extended_roster()) {
        const auto clf = fit(spec, data, 9);
        CAPTURE(spec.id());
        CHECK(training_error(clf, data) <= 0.05);

        // Outputs are valid soft labels.
        const Eigen::MatrixXd p = clf.predict_proba_batch(data.features);
        for (int n = 0; n < p.rows(); ++n) {
            MetaProfile row(p.row(n));
            REQUIRE(validate(row).empty());
        }
    }
}

TEST_CASE("determinism and JSON round trip") {
    GeneratorSpec gs;
    gs.kind = GeneratorKind::concentric_rings;
    gs.n = 150;
    gs.seed = 8;
    const auto data = generate(gs);
    for (const auto& spec : extended_roster()) {
        CAPTURE(spec.id());
        const auto a = fit(spec, data, 17);
        const auto b = fit(spec, data, 17);
        const auto restored = classifier_from_json(nlohmann::json::parse(to_json(a).dump()), data.catalog);
        const Eigen::MatrixXd pa = a.predict_proba_batch(data.features);
        CHECK((pa.array() == b.predict_proba_batch(data.features).array()).all());
        CHECK((pa.array() == restored.predict_proba_batch(data.features).array()).all());
        CHECK(restored.id() == a.id());
    }
}

TEST_CASE("input checks") {
    const auto data = make_data({{0, 0}, {1, 1}, {5, 5}, {6, 6}}, {0, 0, 1, 1});
    const auto clf = fit(parse_learner_spec("lda"), data, 0);
    CHECK_THROWS(clf.predict_proba(vec({1})));
    CHECK_THROWS(clf.predict_proba(vec({1, NAN})));
    CHECK_THROWS(fit(parse_learner_spec("lda"), make_data({{0}, {NAN}}, {0, 1}), 0));
}

TEST_CASE("degenerate scatter falls back to the ridge") {
    // Second feature is constant, so the within-class scatter is singular.
    const auto data = make_data({{0, 1}, {1, 1}, {4, 1}, {5, 1}}, {0, 0, 1, 1});
    for (const char* kind : {"lda", "fisher", "gaussian-naive-bayes"}) {
        CAPTURE(kind);
        const auto p = fit(parse_learner_spec(kind), data, 0).predict_proba(vec({0.2, 1}));
        CHECK(p.allFinite());
        CHECK(p(0) > 0.5);
    }
}
