#include "doctest.h"
#include "fixtures.hpp"

#include "hfc/eval.hpp"

using namespace hfc;

namespace {

using V = std::vector<double>;

ReconciledForecasts forecasts(const Matrix& values, Method tag) {
    ReconciledForecasts f;
    f.values = values;
    f.tag = tag;
    return f;
}

}  // namespace

TEST_CASE("sMAPE fixtures") {
    CHECK(smape(V{5, 7, 0}, V{5, 7, 0}) == 0.0);
    CHECK(std::abs(smape(V{100}, V{50}) - 200.0 / 3.0) <= 1e-9);
    CHECK(std::abs(smape(V{100}, V{50}) - 66.667) <= 1e-3);
    const double two = smape(V{100, 200}, V{110, 180});
    CHECK(std::abs(two - (10.0 / 210.0 + 20.0 / 380.0) * 100.0) <= 1e-12);
    CHECK(two == doctest::Approx(10.025).epsilon(1e-4));
    CHECK(smape(V{0, 4}, V{0, 4}) == 0.0);
    CHECK(smape(V{0, 0}, V{3, 1}) == 200.0);
    CHECK(smape(V{2, 9}, V{0, 0}) == 200.0);
    CHECK_THROWS_AS(smape(V{}, V{}), InvalidInput);
    CHECK_THROWS_AS(smape(V{1}, V{1, 2}), InvalidInput);
}

TEST_CASE("sMAPE is scale free and bounded") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int rep = 0; rep < 50; ++rep) {
        V a(8), f(8);
        for (auto& v : a) v = u(rng);
        for (auto& v : f) v = u(rng);
        const double base = smape(a, f);
        CHECK(base >= 0.0);
        CHECK(base <= 200.0);
        for (double c : {0.1, 10.0}) {
            V ca = a, cf = f;
            for (auto& v : ca) v *= c;
            for (auto& v : cf) v *= c;
            CHECK(std::abs(smape(ca, cf) - base) <= 1e-12);
        }
    }
}

TEST_CASE("windows") {
    const auto w = default_windows(8);
    REQUIRE(w.size() == 3);
    CHECK(w[0].name == "h1");
    CHECK(w[1].name == "h1-4");
    CHECK(w[2].length == 8);
    CHECK(default_windows(3).size() == 1);
}

TEST_CASE("perfect forecasts give an all-zero report") {
    const auto h = fixtures::seven_node();
    std::mt19937_64 rng(4);
    const Matrix actual = (fixtures::random_normal(7, 8, rng).array().abs() + 1).matrix();
    GroupEvaluation g{"g1", &h, actual, {{Method::bu, forecasts(actual, Method::bu)}}};
    const auto report = evaluate({g}, default_windows(8));
    CHECK(report.cells.size() == 9);
    for (const auto& c : report.cells) CHECK(c.median == 0.0);
}

TEST_CASE("a pointwise dominated method never has a smaller median") {
    const auto h = fixtures::seven_node();
    std::mt19937_64 rng(5);
    std::vector<GroupEvaluation> groups;
    std::vector<Matrix> actuals;
    for (int g = 0; g < 4; ++g) {
        const Matrix actual = (fixtures::random_normal(7, 8, rng).array().abs() + 10).matrix();
        const Matrix err = fixtures::random_normal(7, 8, rng);
        const Matrix good = actual + err;
        const Matrix bad = actual + 2.0 * err;
        groups.push_back({"g" + std::to_string(g), &h, actual,
                          {{Method::wls, forecasts(good, Method::wls)}, {Method::bu, forecasts(bad, Method::bu)}}});
    }
    const auto report = evaluate(groups, default_windows(8));
    for (const auto& c : report.cells) {
        if (c.method != Method::bu) continue;
        CHECK(c.median >= *report.median(Method::wls, c.level, c.window));
    }
}

TEST_CASE("two-group hand fixture") {
    const auto h = fixtures::three_node();
    Matrix a1(3, 1), f1(3, 1), a2(3, 1), f2(3, 1);
    a1 << 10, 4, 6;
    f1 << 10, 4, 6;
    a2 << 20, 10, 10;
    f2 << 30, 10, 20;
    const std::vector<GroupEvaluation> groups{{"g1", &h, a1, {{Method::bu, forecasts(f1, Method::bu)}}},
                                              {"g2", &h, a2, {{Method::bu, forecasts(f2, Method::bu)}}}};
    const auto report = evaluate(groups, {{"h1", 1}});
    // Top: 0 and 2*10/50*100 = 40. Bottom: 0, 0, 0 and 2*10/30*100 = 66.67.
    CHECK(*report.median(Method::bu, Level::top, "h1") == doctest::Approx(20.0));
    CHECK(*report.median(Method::bu, Level::bottom, "h1") == doctest::Approx(0.0));
    CHECK_FALSE(report.median(Method::bu, Level::middle, "h1"));
    for (const auto& c : report.cells) {
        std::vector<double> raw;
        for (const auto& s : c.scores) {
            raw.push_back(s.smape);
            CHECK(s.smape >= 0.0);
            CHECK(s.smape <= 200.0);
        }
        CHECK(median_of(raw) == c.median);
    }
    const auto& bottom = report.cells[1];
    CHECK(bottom.scores.size() == 4);
}

TEST_CASE("horizon mismatch is an error") {
    const auto h = fixtures::three_node();
    GroupEvaluation g{"g", &h, Matrix::Ones(3, 8), {{Method::bu, forecasts(Matrix::Ones(3, 4), Method::bu)}}};
    CHECK_THROWS_AS(evaluate({g}, default_windows(8)), InvalidInput);
    GroupEvaluation short_actual{"g", &h, Matrix::Ones(3, 4), {{Method::bu, forecasts(Matrix::Ones(3, 8), Method::bu)}}};
    CHECK_THROWS_AS(evaluate({short_actual}, default_windows(8)), InvalidInput);
}

TEST_CASE("ranking") {
    EvalReport r;
    r.windows = {"h1"};
    r.cells.push_back({Method::bu, Level::top, "h1", 5.0, {}});
    auto single = rank_methods(r);
    REQUIRE(single.size() == 1);
    CHECK(single[0].order == std::vector<Method>{Method::bu});
    CHECK_FALSE(single[0].tie);

    r.cells.push_back({Method::cmo, Level::top, "h1", 3.0, {}});
    r.cells.push_back({Method::wls, Level::top, "h1", 4.0, {}});
    auto ordered = rank_methods(r);
    CHECK(ordered[0].order == std::vector<Method>{Method::cmo, Method::wls, Method::bu});
    CHECK_FALSE(ordered[0].tie);

    r.cells.push_back({Method::td_gs1, Level::top, "h1", 4.0, {}});
    auto tied = rank_methods(r);
    CHECK(tied[0].order == std::vector<Method>{Method::cmo, Method::td_gs1, Method::wls, Method::bu});
    CHECK(tied[0].tie);
}

TEST_CASE("report CSV, JSON and table") {
    const auto h = fixtures::seven_node();
    std::mt19937_64 rng(6);
    const Matrix actual = (fixtures::random_normal(7, 8, rng).array().abs() + 5).matrix();
    const Matrix noisy = actual + fixtures::random_normal(7, 8, rng);
    GroupEvaluation g{"g1", &h, actual,
                      {{Method::bu, forecasts(noisy, Method::bu)}, {Method::dhf_gbt, forecasts(actual, Method::dhf_gbt)}}};
    const auto report = evaluate({g}, default_windows(8));
    const auto csv = report_csv(report);
    CHECK(csv.rfind("method,level,window,median_smape\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 18);
    CHECK(csv.find("DHF_GBT,top,h1,0.000000") != std::string::npos);

    const auto back = report_from_json(nlohmann::json::parse(report_json(report).dump()));
    CHECK(report_csv(back) == csv);
    CHECK(back.cells[3].scores.size() == report.cells[3].scores.size());
    const auto table = report_table(report);
    CHECK(table.find("DHF_GBT") < table.find("BU"));
    CHECK(table.find("h1-8:bottom") != std::string::npos);
}
