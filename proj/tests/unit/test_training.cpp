#include <doctest.h>

#include <random>

#include "granulex/training.hpp"
#include "granulex/workbench.hpp"
#include "support/oracles.hpp"

using namespace granulex;

namespace {

// Feature 0 is the row id, feature 1 a noisy class signal.
Dataset id_dataset(int n, int classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise;
    Eigen::MatrixXd x(n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = i % classes;
        x(i, 0) = i;
        x(i, 1) = (i % classes) + noise(rng);
    }
    std::vector<std::string> names;
    for (int m = 0; m < classes; ++m) names.push_back("c" + std::to_string(m));
    return Dataset(x, labels, ClassCatalog(names), "ids");
}

Dataset rings(int n, std::uint64_t seed) {
    GeneratorSpec g;
    g.kind = GeneratorKind::concentric_rings;
    g.n = n;
    g.seed = seed;
    g.classes = 3;
    return generate(g);
}

const std::vector<LearnerSpec> kSmallRoster{parse_learner_spec("lda"), parse_learner_spec("knn:k=5"),
                                            parse_learner_spec("gaussian-naive-bayes"),
                                            parse_learner_spec("decision-tree")};

}  // namespace

TEST_CASE("alpha grid") {
    const auto g = AlphaGrid::standard();
    REQUIRE(g.size() == 41);
    CHECK(g.values().front() == 0.0);
    CHECK(g.values()[3] == 0.3);
    CHECK(g.values()[29] == 2.9);
    CHECK(g.values().back() == 4.0);
    CHECK(AlphaGrid::parse("1").values() == std::vector<double>{1.0});
    CHECK(AlphaGrid::parse("0.5:0.5:2").size() == 4);
    CHECK_THROWS(AlphaGrid::parse("0:0:1"));
    CHECK_THROWS(AlphaGrid::parse("2:0.1:1"));
    CHECK_THROWS(AlphaGrid::parse("a:b"));
    CHECK_THROWS(AlphaGrid::parse("-1"));
    CHECK_THROWS(AlphaGrid({0.5, 0.5}));
    CHECK_THROWS(AlphaGrid(std::vector<double>{}));
}

TEST_CASE("fold plans are stratified partitions") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const int classes = 2 + trial % 4, folds = 2 + trial % 9;
        std::vector<int> labels;
        for (int m = 0; m < classes; ++m) {
            const int count = folds + static_cast<int>(rng() % 40);
            for (int i = 0; i < count; ++i) labels.push_back(m);
        }
        std::shuffle(labels.begin(), labels.end(), rng);
        const auto plan = make_fold_plan(labels, classes, folds, rng());
        REQUIRE(plan.assignments.size() == labels.size());
        std::vector<int> total(static_cast<std::size_t>(folds));
        std::vector<std::vector<int>> per_class(static_cast<std::size_t>(classes), std::vector<int>(static_cast<std::size_t>(folds)));
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const int f = plan.assignments[i];
            REQUIRE(f >= 0);
            REQUIRE(f < folds);
            ++total[static_cast<std::size_t>(f)];
            ++per_class[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(f)];
        }
        CHECK(*std::max_element(total.begin(), total.end()) - *std::min_element(total.begin(), total.end()) <= 1);
        for (const auto& pc : per_class) CHECK(*std::max_element(pc.begin(), pc.end()) - *std::min_element(pc.begin(), pc.end()) <= 1);

        std::size_t covered = 0;
        for (int f = 0; f < folds; ++f) {
            const auto test = plan.test_rows(f), train = plan.train_rows(f);
            CHECK(test.size() + train.size() == labels.size());
            covered += test.size();
        }
        CHECK(covered == labels.size());
    }
    CHECK_THROWS(make_fold_plan(std::vector<int>{0, 1, 0}, 2, 1, 0));
}

TEST_CASE("meta-data comes from out-of-fold models only") {
    const auto data = id_dataset(37, 3, 1);
    auto audit = std::make_shared<oracle::AuditLearner>();
    const std::vector<std::shared_ptr<const Learner>> learners{audit, audit};
    const auto plan = make_fold_plan(data.labels, 3, 5, 77);
    const auto meta = generate_meta_cv(data, learners, plan, 3);
    REQUIRE(meta.size() == 37);
    for (int n = 0; n < meta.size(); ++n)
        for (int k = 0; k < 2; ++k) CHECK(meta[n].scores(k, 2) == 1.0);
    // One fit per (fold, learner), each on exactly the complement of a fold.
    const auto fits = audit->fits();
    REQUIRE(fits.size() == 10);
    for (const auto& f : fits) {
        bool matches_some_fold = false;
        for (int t = 0; t < 5; ++t) {
            const auto train = plan.train_rows(t);
            matches_some_fold = matches_some_fold || std::set<std::size_t>(train.begin(), train.end()) == f.origins;
        }
        CHECK(matches_some_fold);
    }
}

TEST_CASE("memorizing learner still shows held-out error") {
    GeneratorSpec g;
    g.n = 120;
    g.noise = 1.5;
    g.seed = 2;
    const auto data = generate(g);
    const std::vector<LearnerSpec> specs{parse_learner_spec("knn:k=1"), parse_learner_spec("knn:k=1")};
    const auto plan = make_fold_plan(data.labels, 2, 4, 5);
    const auto meta = generate_meta_cv(data, specs, plan, 1);
    CHECK(error_for_alpha(meta, data.labels, 1.0, HFunction::h3) > 0.0);
}

TEST_CASE("meta-data shape and determinism") {
    const auto data = id_dataset(4, 2, 3);
    const std::vector<LearnerSpec> specs{parse_learner_spec("nearest-mean"), parse_learner_spec("knn:k=1")};
    const auto plan = make_fold_plan(data.labels, 2, 2, 9);
    const auto meta = generate_meta_cv(data, specs, plan, 1);
    CHECK(meta.size() == 4);
    CHECK(meta.classifiers() == 2);
    CHECK(meta.flatten().cols() == 4);

    const auto r = rings(90, 4);
    const auto p = make_fold_plan(r.labels, 3, 5, 1);
    const auto a = generate_meta_cv(r, kSmallRoster, p, 8).flatten();
    const auto b = generate_meta_cv(r, kSmallRoster, p, 8).flatten();
    CHECK((a.array() == b.array()).all());
}

TEST_CASE("a fold missing a class is an error") {
    const auto data = id_dataset(6, 3, 3);
    FoldPlan plan;
    plan.folds = 2;
    plan.assignments = {0, 0, 0, 1, 1, 0};  // class 2 (rows 2, 5) only in fold 0
    CHECK_THROWS_WITH(generate_meta_cv(data, kSmallRoster, plan, 1), doctest::Contains("c2"));
}

TEST_CASE("error for alpha") {
    Eigen::MatrixXd same(2, 2);
    same << 0.5, 0.5, 0.5, 0.5;
    const ClassCatalog catalog({"a", "b"});
    std::vector<MetaProfile> rows(10, MetaProfile(same));
    const MetaMatrix meta(rows, catalog);
    const std::vector<int> labels{0, 1, 1, 0, 1, 0, 0, 1, 1, 1};
    CHECK(error_for_alpha(meta, labels, 1.0, HFunction::h3) == doctest::Approx(0.6));
    CHECK_THROWS(error_for_alpha(meta, std::vector<int>{0, 1}, 1.0, HFunction::h3));
}

TEST_CASE("select alpha agrees with a linear scan") {
    const auto data = rings(120, 6);
    const auto plan = make_fold_plan(data.labels, 3, 5, 2);
    const auto meta = generate_meta_cv(data, kSmallRoster, plan, 3);
    for (auto h : {HFunction::h1, HFunction::h2, HFunction::h3}) {
        const auto grid = AlphaGrid::standard();
        const auto sel = select_alpha(meta, data.labels, grid, h);
        REQUIRE(sel.curve.size() == 41);
        double best_alpha = -1, best_err = 2;
        for (double a : grid.values()) {
            const double e = error_for_alpha(meta, data.labels, a, h);
            if (e < best_err) {
                best_err = e;
                best_alpha = a;
            }
        }
        CHECK(sel.alpha == best_alpha);
        for (std::size_t i = 0; i < 41; ++i) {
            CHECK(sel.curve[i].first == grid.values()[i]);
            CHECK(sel.curve[i].second == error_for_alpha(meta, data.labels, grid.values()[i], h));
        }
    }
    // Flat curve: smallest alpha.
    Eigen::MatrixXd same(2, 2);
    same << 0.5, 0.5, 0.5, 0.5;
    const MetaMatrix flat(std::vector<MetaProfile>(4, MetaProfile(same)), ClassCatalog({"a", "b"}));
    const std::vector<int> labels{0, 1, 0, 1};
    CHECK(select_alpha(flat, labels, AlphaGrid::parse("0.2:0.1:1"), HFunction::h3).alpha == 0.2);
    CHECK(select_alpha(flat, labels, AlphaGrid::parse("1"), HFunction::h3).alpha == 1.0);
}

TEST_CASE("train") {
    const auto data = rings(150, 7);
    SUBCASE("grid mode") {
        TrainOptions opt;
        opt.folds = 5;
        opt.seed = 3;
        const auto e = train(data, kSmallRoster, opt);
        CHECK(e.classifiers.size() == 4);
        REQUIRE(e.alpha_error_curve.size() == 41);
        double min_err = 1;
        for (const auto& [a, err] : e.alpha_error_curve) {
            CHECK(err >= 0.0);
            CHECK(err <= 1.0);
            min_err = std::min(min_err, err);
        }
        const auto grid = AlphaGrid::standard().values();
        CHECK(std::find(grid.begin(), grid.end(), e.alpha) != grid.end());
        for (const auto& [a, err] : e.alpha_error_curve)
            if (a == e.alpha) CHECK(err == min_err);

        const auto curve = cross_validated_alpha(data, make_learners(kSmallRoster), AlphaGrid::standard(), HFunction::h3, 5, 3);
        CHECK(curve.curve == e.alpha_error_curve);
    }
    SUBCASE("fixed mode skips cross-validation") {
        const auto audit_data = id_dataset(40, 2, 1);
        auto audit = std::make_shared<oracle::AuditLearner>();
        TrainOptions opt;
        opt.alpha = 1.0;
        const auto e = train(audit_data, {audit, audit}, opt);
        CHECK(e.alpha == 1.0);
        CHECK(e.alpha_error_curve.empty());
        const auto fits = audit->fits();
        REQUIRE(fits.size() == 2);
        for (const auto& f : fits) CHECK(f.origins.size() == 40);
    }
    SUBCASE("refit uses the full data") {
        TrainOptions a, b;
        a.folds = b.folds = 5;
        a.seed = 1;
        b.seed = 2;
        const auto ea = train(data, kSmallRoster, a), eb = train(data, kSmallRoster, b);
        for (std::size_t k = 0; k < kSmallRoster.size(); ++k) {
            const Eigen::MatrixXd pa = ea.classifiers[k].predict_proba_batch(data.features);
            CHECK((pa.array() == eb.classifiers[k].predict_proba_batch(data.features).array()).all());
        }
    }
    SUBCASE("preconditions") {
        TrainOptions opt;
        opt.folds = 60;
        CHECK_THROWS(train(data, kSmallRoster, opt));
        opt.folds = 1;
        CHECK_THROWS(train(data, kSmallRoster, opt));
        opt.folds = 5;
        CHECK_THROWS(train(data, {parse_learner_spec("lda")}, opt));
    }
}

TEST_CASE("predict, batch order, archive round trip") {
    const auto data = rings(150, 8);
    TrainOptions opt;
    opt.folds = 5;
    opt.seed = 11;
    opt.h = HFunction::h1;
    const auto e = train(data, kSmallRoster, opt);

    const auto batch = predict(e, data.features);
    REQUIRE(batch.size() == 150);
    for (int n = 0; n < 150; n += 7) {
        const auto one = predict(e, Eigen::VectorXd(data.features.row(n).transpose()));
        const auto& b = batch[static_cast<std::size_t>(n)];
        CHECK(one.label == b.label);
        CHECK(one.profile.scores == b.profile.scores);
        const auto direct = granular_classify(one.profile, e.alpha, e.h);
        CHECK(direct.label == one.label);
        CHECK(direct.membership.values == one.membership.values);
        for (const auto& g : one.intervals) {
            CHECK(g.lower >= 0.0);
            CHECK(g.lower <= g.upper);
            CHECK(g.upper <= 1.0);
        }
    }

    const auto restored = ensemble_from_json(nlohmann::json::parse(to_json(e).dump()));
    CHECK(restored.alpha == e.alpha);
    CHECK(restored.h == e.h);
    CHECK(restored.catalog == e.catalog);
    CHECK(restored.alpha_error_curve == e.alpha_error_curve);
    const auto again = predict(restored, data.features);
    for (std::size_t n = 0; n < batch.size(); ++n) {
        REQUIRE(again[n].label == batch[n].label);
        REQUIRE(again[n].membership.values == batch[n].membership.values);
    }

    auto bad = to_json(e);
    bad["version"] = 99;
    CHECK_THROWS(ensemble_from_json(bad));
    CHECK_THROWS(predict(e, Eigen::VectorXd(Eigen::VectorXd::Zero(5))));
}

TEST_CASE("unanimous classifiers give zero-length intervals") {
    Dataset data(Eigen::MatrixXd::Zero(4, 1), {0, 0, 1, 1}, ClassCatalog({"a", "b"}));
    data.features << 0, 0.1, 10, 10.1;
    TrainOptions opt;
    opt.alpha = 1.0;
    const std::vector<LearnerSpec> specs{parse_learner_spec("knn:k=1"), parse_learner_spec("knn:k=1"),
                                         parse_learner_spec("knn:k=1")};
    const auto e = train(data, specs, opt);
    Eigen::VectorXd x(1);
    x << 9.0;
    const auto p = predict(e, x);
    CHECK(p.label == 1);
    for (const auto& g : p.intervals) CHECK(g.length() == 0.0);
}
