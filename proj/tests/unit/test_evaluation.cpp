#include <doctest.h>

#include <random>

#include "granulex/evaluation.hpp"
#include "granulex/report.hpp"
#include "granulex/workbench.hpp"
#include "support/oracles.hpp"

using namespace granulex;

TEST_CASE("error rate") {
    const std::vector<int> truth{0, 1, 1, 0};
    CHECK(error_rate(truth, truth) == 0.0);
    CHECK(error_rate(std::vector<int>{1, 0, 0, 1}, truth) == 1.0);
    std::vector<int> pred(100, 0), t(100, 0);
    for (int i = 0; i < 25; ++i) pred[static_cast<std::size_t>(i)] = 1;
    CHECK(error_rate(pred, t) == 0.25);
    CHECK_THROWS(error_rate(std::vector<int>{0}, truth));
}

TEST_CASE("macro F1") {
    const std::vector<int> truth{0, 1, 2, 1};
    CHECK(macro_f1(truth, truth, 3) == 1.0);
    // Class 0: TP 2, FP 1, FN 1; class 1 mirrored.
    const std::vector<int> t{0, 0, 0, 1, 1, 1}, p{0, 0, 1, 1, 1, 0};
    CHECK(macro_f1(p, t, 2) == doctest::Approx(2.0 / 3.0));
    // Never predicts class 1: class 1 contributes 0.
    const std::vector<int> t2{0, 0, 1, 1}, p2{0, 0, 0, 0};
    const double f0 = 2 * 0.5 * 1.0 / 1.5;
    CHECK(macro_f1(p2, t2, 2) == doctest::Approx(f0 / 2));
    // Invariant under consistent relabeling.
    const std::vector<int> t3{2, 2, 2, 0, 0, 0}, p3{2, 2, 0, 0, 0, 2};
    CHECK(macro_f1(p3, t3, 3) == doctest::Approx(macro_f1(p, t, 3)));
    CHECK(error_rate(p3, t3) == error_rate(p, t));
}

TEST_CASE("bias and variance") {
    const std::vector<int> truth{0, 1, 0, 1};
    const auto perfect = bias_variance(truth, {truth, truth}, truth);
    CHECK(perfect.bias == 0.0);
    CHECK(perfect.variance == 0.0);
    CHECK(bias_variance(std::vector<int>{1, 1, 0, 1}, {truth}, truth).bias == 0.25);
    const std::vector<int> final2{0, 1};
    const auto bv = bias_variance(final2, {{0, 1}, {0, 0}}, std::vector<int>{0, 1});
    CHECK(bv.variance == 0.25);
    CHECK_THROWS(bias_variance(final2, {{0}}, std::vector<int>{0, 1}));
    CHECK_THROWS(bias_variance(final2, {}, std::vector<int>{0, 1}));

    std::mt19937_64 rng(30);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t s = 1 + rng() % 6, k = 1 + rng() % 4;
        auto draw = [&] {
            std::vector<int> v(s);
            for (auto& x : v) x = static_cast<int>(rng() % 3);
            return v;
        };
        const auto truth_r = draw(), final_r = draw();
        std::vector<std::vector<int>> members;
        for (std::size_t i = 0; i < k; ++i) members.push_back(draw());
        const auto got = bias_variance(final_r, members, truth_r);
        const auto want = oracle::bias_variance(final_r, members, truth_r);
        CHECK(got.bias == doctest::Approx(want.bias).epsilon(1e-15));
        CHECK(got.variance == doctest::Approx(want.variance).epsilon(1e-15));
    }
}

TEST_CASE("Wilcoxon signed-rank") {
    const std::vector<double> five_a{1, 2, 3, 4, 5}, zeros5(5, 0.0);
    auto r = wilcoxon_signed_rank(five_a, zeros5, 0.05);
    CHECK(r.exact);
    CHECK(r.w_minus == 0.0);
    CHECK(r.w_plus == 15.0);
    CHECK(r.p_value == 0.0625);
    CHECK(r.verdict == Verdict::equal);

    std::vector<double> ten(10), zeros10(10, 0.0);
    for (int i = 0; i < 10; ++i) ten[static_cast<std::size_t>(i)] = 0.1 * (i + 1);
    r = wilcoxon_signed_rank(ten, zeros10, 0.05);
    CHECK(r.p_value == 2.0 / 1024.0);
    CHECK(r.verdict == Verdict::a_better);
    r = wilcoxon_signed_rank(ten, zeros10, 0.05, Preference::lower);
    CHECK(r.verdict == Verdict::b_better);

    r = wilcoxon_signed_rank(five_a, five_a, 0.05);
    CHECK(r.insufficient);
    CHECK(r.n == 0);
    CHECK(r.verdict == Verdict::equal);
    CHECK_THROWS(wilcoxon_signed_rank(five_a, ten, 0.05));

    SUBCASE("exact mode matches enumeration") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 5 + trial % 8;
            std::vector<double> a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                // Small integer grid so ties and zero differences occur.
                a[i] = static_cast<double>(rng() % 7);
                b[i] = static_cast<double>(rng() % 7);
            }
            const auto res = wilcoxon_signed_rank(a, b, 0.05);
            if (res.insufficient) continue;
            CHECK(res.p_value == oracle::wilcoxon_exact_p(a, b));
        }
    }
    SUBCASE("normal approximation above 25 pairs") {
        std::vector<double> a(40), b(40, 0.0);
        for (int i = 0; i < 40; ++i) a[static_cast<std::size_t>(i)] = (i % 4 == 0 ? -1.0 : 1.0) * (i + 1);
        const auto res = wilcoxon_signed_rank(a, b, 0.05);
        CHECK_FALSE(res.exact);
        CHECK(res.p_value > 0.0);
        CHECK(res.p_value < 0.05);
        CHECK(res.verdict == Verdict::a_better);
    }
}

TEST_CASE("average ranks") {
    Eigen::MatrixXd t(2, 3);
    t << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
    auto r = average_ranks(t);
    CHECK(r(0) == 1.0);
    CHECK(r(1) == 2.0);

    Eigen::MatrixXd tie(2, 1);
    tie << 0.2, 0.2;
    r = average_ranks(tie);
    CHECK(r(0) == 1.5);
    CHECK(r(1) == 1.5);

    Eigen::MatrixXd three(3, 4);
    three << 0.1, 0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 0.2, 0.3, 0.3, 0.3, 0.3;
    r = average_ranks(three);
    CHECK(r(0) == 1.0);
    CHECK(r(1) == 2.0);
    CHECK(r(2) == 3.0);

    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 2 + trial % 8;
        Eigen::MatrixXd m(p, 5);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < 5; ++j) m(i, j) = static_cast<double>(rng() % 4);
        CHECK(average_ranks(m).sum() == doctest::Approx(p * (p + 1) / 2.0));
    }
    Eigen::MatrixXd missing(2, 1);
    missing << 0.1, NAN;
    CHECK_THROWS(average_ranks(missing));
}

TEST_CASE("method resolution") {
    const auto roster = default_roster();
    const auto all = resolve_methods(default_method_names(), roster);
    CHECK(all.size() == 10 + 6 + 3);
    CHECK(all[0].name == "learner:lda");
    CHECK(all[0].kind == Method::Kind::single);
    const auto fr = resolve_methods({"fixed-rules"}, roster);
    CHECK(fr.size() == 6);
    CHECK(fr[5].name == "vote");
    CHECK(resolve_methods({"learner:knn25"}, roster)[0].learner == 3);
    CHECK_THROWS(resolve_methods({"sum", "sum"}, roster));
    CHECK_THROWS(resolve_methods({"learner:svm"}, roster));
    CHECK_THROWS(resolve_methods({"averaging"}, roster));
}

TEST_CASE("summaries use the sample variance") {
    MethodResult m;
    m.errors = {0.1, 0.2, 0.3};
    m.f1 = {0.9, 0.9, 0.9};
    summarize(m);
    CHECK(m.error_mean == doctest::Approx(0.2));
    CHECK(m.error_variance == doctest::Approx(0.01));
    CHECK(m.f1_variance == 0.0);
}

namespace {

std::vector<Dataset> toy_datasets() {
    GeneratorSpec a, b;
    a.n = 60;
    a.seed = 1;
    b.kind = GeneratorKind::concentric_rings;
    b.n = 90;
    b.seed = 2;
    auto da = generate(a), db = generate(b);
    da.name = "gauss";
    db.name = "rings";
    return {da, db};
}

ProtocolConfig small_config() {
    ProtocolConfig c;
    c.folds = 3;
    c.repeats = 2;
    c.inner_folds = 3;
    c.seed = 5;
    c.learners = {parse_learner_spec("lda"), parse_learner_spec("knn:k=5"), parse_learner_spec("nearest-mean")};
    return c;
}

}  // namespace

TEST_CASE("protocol shape and determinism") {
    const auto data = toy_datasets();
    const auto config = small_config();
    const auto report = run_protocol(data, config);
    REQUIRE(report.datasets.size() == 2);
    CHECK(report.methods.size() == 3 + 6 + 3);
    for (const auto& d : report.datasets) {
        for (const auto& name : report.methods) {
            const auto& m = d.methods.at(name);
            CHECK(m.errors.size() == 6);
            CHECK(m.f1.size() == 6);
            for (double e : m.errors) {
                CHECK(e >= 0.0);
                CHECK(e <= 1.0);
            }
        }
        CHECK(d.selected_alphas.size() == 6);
        CHECK(d.bias_variance.at("granular-fixed").run_bias.size() == 6);
        CHECK(d.bias_variance.at("median").run_variance.size() == 6);
    }
    // Every non-granular method is compared against both granular methods.
    CHECK(report.comparisons.size() == 2 * (report.methods.size() - 1));
    for (const auto& c : report.comparisons) CHECK(c.error_win + c.error_equal + c.error_loss == 2);
    double rank_sum = 0;
    for (const auto& [name, rank] : report.error_rank) rank_sum += rank;
    CHECK(rank_sum == doctest::Approx(12 * 13 / 2.0));

    const auto again = run_protocol(data, config);
    CHECK(report_to_json(report, {}).dump() == report_to_json(again, {}).dump());
    CHECK(report_runs_csv(report) == report_runs_csv(again));

    auto shape = config;
    shape.folds = 2;
    shape.repeats = 1;
    shape.methods = {"sum", "granular-fixed"};
    const auto small = run_protocol(data, shape);
    CHECK(small.datasets[0].methods.at("sum").errors.size() == 2);
    CHECK(small.datasets[0].selected_alphas.empty());
}

TEST_CASE("granular-fixed at huge alpha with h1 matches the median rule fold by fold") {
    auto config = small_config();
    config.methods = {"median", "granular-fixed"};
    config.fixed_alpha = 1e6;
    config.h = HFunction::h1;
    config.learners.push_back(parse_learner_spec("gaussian-naive-bayes"));
    config.learners.push_back(parse_learner_spec("decision-tree"));
    const auto report = run_protocol(toy_datasets(), config);
    for (const auto& d : report.datasets)
        CHECK(d.methods.at("median").errors == d.methods.at("granular-fixed").errors);
}

TEST_CASE("protocol errors") {
    auto config = small_config();
    config.folds = 40;
    CHECK_THROWS_WITH(run_protocol(toy_datasets(), config), doctest::Contains("gauss"));
    config = small_config();
    config.repeats = 0;
    CHECK_THROWS(validate(config));
    config = small_config();
    config.significance = 1.0;
    CHECK_THROWS(validate(config));
}

TEST_CASE("report emitters") {
    const auto report = run_protocol(toy_datasets(), small_config());
    const auto j = report_to_json(report, nlohmann::ordered_json{{"seed", 5}});
    CHECK(j["format"] == "granulex-report");
    CHECK(j["config"]["seed"] == 5);
    const auto runs = report_runs_csv(report);
    CHECK(runs.rfind("dataset,method,repeat,fold,error,f1\n", 0) == 0);
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 1 + 2 * 12 * 6);
    const auto table = report_table(report);
    CHECK(table.find("granular-cv") != std::string::npos);
    CHECK(table.find("AVERAGE RANKS") != std::string::npos);
}
