#include "doctest.h"
#include "fixtures.hpp"

#include "hfc/reconcile.hpp"

using namespace hfc;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

// Children (1,4) and (3,6) under totals (4,10).
SeriesPanel two_week_panel(double scale = 1.0) {
    const auto h = fixtures::three_node();
    Matrix sales(2, 2), price = Matrix::Ones(2, 2);
    sales << 1, 4, 3, 6;
    return panel_from_bottom(h, scale * sales, price);
}

ProportionGroup ab_group() { return {"T", {"A", "B"}}; }

BaseForecasts base_of(const Matrix& values) {
    BaseForecasts b;
    b.values = values;
    return b;
}

CovarianceEstimate identity_w(Eigen::Index m, CovarianceKind kind = CovarianceKind::sample) {
    return {Matrix::Identity(m, m), kind, 0.0};
}

}  // namespace

TEST_CASE("method names round trip and unknown names list the valid ones") {
    for (auto m : all_methods()) CHECK(parse_method(method_name(m)) == m);
    CHECK(all_methods().size() == 11);
    CHECK_THROWS_WITH_AS(parse_method("ARIMA"), doctest::Contains("MINT_SHRINK"), InvalidInput);
}

TEST_CASE("bottom-up P") {
    Matrix expected(2, 3);
    expected << 0, 1, 0, 0, 0, 1;
    CHECK(p_bottom_up(summing_matrix(fixtures::three_node())).entries == expected);

    const auto p = p_bottom_up(summing_matrix(fixtures::fifteen_node())).entries;
    CHECK(p.rows() == 12);
    CHECK(p.cols() == 15);
    CHECK(p.rightCols(12) == Matrix::Identity(12, 12));
    CHECK(p.leftCols(3).isZero());

    const auto s = summing_matrix(fixtures::seven_node());
    CHECK(((s * p_bottom_up(s).entries * s) - s).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Gross-Sohl proportion fixtures") {
    const auto panel = two_week_panel();
    const auto gs1 = td_proportions_gs1(panel, ab_group());
    CHECK(std::abs(gs1.values[0] - 0.325) <= 1e-12);
    CHECK(std::abs(gs1.values[1] - 0.675) <= 1e-12);
    CHECK(gs1.basis == ProportionBasis::historical_avg);

    const auto gs2 = td_proportions_gs2(panel, ab_group());
    CHECK(std::abs(gs2.values[0] - 2.5 / 7.0) <= 1e-12);
    CHECK(gs2.basis == ProportionBasis::avg_of_ratios);

    const auto scaled = td_proportions_gs2(two_week_panel(10.0), ab_group());
    CHECK(std::abs(scaled.values[0] - gs2.values[0]) <= 1e-12);
    CHECK(std::abs(scaled.values[1] - gs2.values[1]) <= 1e-12);
}

TEST_CASE("Gross-Sohl degenerate groups") {
    const auto h = fixtures::three_node();
    Matrix equal = Matrix::Constant(2, 4, 5.0);
    const auto even = panel_from_bottom(h, equal, Matrix::Ones(2, 4));
    CHECK(td_proportions_gs1(even, ab_group()).values == std::vector<double>{0.5, 0.5});
    CHECK(td_proportions_gs2(even, ab_group()).values == std::vector<double>{0.5, 0.5});

    Matrix lopsided(2, 3);
    lopsided << 2, 5, 1, 0, 0, 0;
    const auto one = panel_from_bottom(h, lopsided, Matrix::Ones(2, 3));
    CHECK(td_proportions_gs1(one, ab_group()).values == std::vector<double>{1.0, 0.0});

    Matrix gaps(2, 3);
    gaps << 1, 0, 3, 1, 0, 1;
    const auto skipped = panel_from_bottom(h, gaps, Matrix::Ones(2, 3));
    CHECK(td_proportions_gs1(skipped, ab_group()).values[0] == doctest::Approx((0.5 + 0.75) / 2));

    const auto zero = panel_from_bottom(h, Matrix::Zero(2, 3), Matrix::Ones(2, 3));
    CHECK_THROWS_AS(td_proportions_gs1(zero, ab_group()), InvalidInput);
    CHECK_THROWS_AS(td_proportions_gs2(zero, ab_group()), InvalidInput);
}

TEST_CASE("TDFP proportions") {
    SUBCASE("three nodes") {
        Matrix v(3, 1);
        v << 8, 2, 6;
        const auto p = tdfp_proportions(base_of(v), 0, fixtures::three_node());
        CHECK(p.values[0] == doctest::Approx(0.25));
        CHECK(p.values[1] == doctest::Approx(0.75));
        CHECK(p.basis == ProportionBasis::forecasted);
    }
    SUBCASE("equal forecasts on Fig. 1") {
        const auto h = fixtures::fifteen_node();
        Matrix v = Matrix::Constant(15, 1, 3.0);
        for (double p : tdfp_proportions(base_of(v), 0, h).values) CHECK(p == doctest::Approx(1.0 / 12));
    }
    SUBCASE("seven nodes against the product formula by hand") {
        const auto h = fixtures::seven_node();  // T, A, B, A1, A2, B1, B2
        Matrix v(7, 2);
        v << 20, 1, 12, 1, 9, 1, 5, 1, 4, 1, 1, 1, 7, 2;
        const auto p = tdfp_proportions(base_of(v), 0, h);
        const double a = 12.0 / 21.0, b = 9.0 / 21.0;
        const std::vector<double> hand{a * 5.0 / 9.0, a * 4.0 / 9.0, b * 1.0 / 8.0, b * 7.0 / 8.0};
        const double total = hand[0] + hand[1] + hand[2] + hand[3];
        for (std::size_t j = 0; j < 4; ++j) CHECK(p.values[j] == doctest::Approx(hand[j] / total).epsilon(1e-12));
        const auto p1 = tdfp_proportions(base_of(v), 1, h);
        CHECK(p1.values[3] == doctest::Approx(0.5 * 2.0 / 3.0));
    }
    SUBCASE("zero sibling total is an error") {
        Matrix v(3, 1);
        v << 8, 0, 0;
        CHECK_THROWS_AS(tdfp_proportions(base_of(v), 0, fixtures::three_node()), InvalidInput);
    }
}

TEST_CASE("top-down P and reconciliation keep the top forecast") {
    const auto s = summing_matrix(fixtures::three_node());
    const auto p = p_top_down({{0.3, 0.7}, ProportionBasis::historical_avg}, 3);
    Matrix expected(2, 3);
    expected << 0.3, 0, 0, 0.7, 0, 0;
    CHECK(p.entries == expected);
    CHECK(p.tag == Method::td_gs1);
    CHECK(p_top_down({{0.3, 0.7}, ProportionBasis::avg_of_ratios}, 3).tag == Method::td_gs2);
    CHECK(p_top_down({{0.3, 0.7}, ProportionBasis::forecasted}, 3).tag == Method::tdfp);
    CHECK_THROWS_AS(p_top_down({{0.3, 0.6}, ProportionBasis::historical_avg}, 3), InvalidInput);

    Matrix base(3, 1);
    base << 10, 1, 1;
    const auto r = reconcile(p_top_down({{0.25, 0.75}, ProportionBasis::historical_avg}, 3), s, base);
    CHECK(r.values(0, 0) == 10.0);
    CHECK(r.values(1, 0) == 2.5);
    CHECK(r.values(2, 0) == 7.5);

    std::mt19937_64 rng(5);
    const auto h = fixtures::fifteen_node();
    const auto big_s = summing_matrix(h);
    const auto panel = fixtures::random_panel(h, 20, rng);
    const Matrix b = (fixtures::random_normal(15, 8, rng).array().abs() + 1.0).matrix();
    for (const auto& props : {td_proportions_gs1(panel, top_down_group(h)), td_proportions_gs2(panel, top_down_group(h))}) {
        const auto out = reconcile(p_top_down(props, 15), big_s, b);
        CHECK((out.values.row(0) - b.row(0)).cwiseAbs().maxCoeff() <= 1e-12 * b.row(0).cwiseAbs().maxCoeff());
    }
    const auto tdfp = reconcile_tdfp(base_of(b), h, big_s);
    CHECK((tdfp.values.row(0) - b.row(0)).cwiseAbs().maxCoeff() <= 1e-12 * b.row(0).cwiseAbs().maxCoeff());
}

TEST_CASE("WLS and MinT closed forms on three nodes") {
    const auto s = summing_matrix(fixtures::three_node());
    Matrix expected(2, 3);
    expected << 1, 2, -1, 1, -1, 2;
    expected /= 3.0;
    const auto wls = p_wls(s, identity_w(3, CovarianceKind::diagonal));
    CHECK((wls.entries - expected).cwiseAbs().maxCoeff() <= 1e-12);
    const auto mint = p_mint(s, identity_w(3));
    CHECK((mint.entries - wls.entries).cwiseAbs().maxCoeff() <= 1e-10);

    Matrix base(3, 1);
    base << 10, 4, 4;
    const auto r = reconcile(mint, s, base);
    CHECK(std::abs(r.values(0, 0) - 28.0 / 3.0) <= 1e-9);
    CHECK(std::abs(r.values(1, 0) - 14.0 / 3.0) <= 1e-9);
    CHECK(std::abs(r.values(2, 0) - 14.0 / 3.0) <= 1e-9);

    const auto bu = reconcile(p_bottom_up(s), s, base);
    CHECK(bu.values.col(0) == vec({8, 4, 4}));
}

TEST_CASE("WLS rejects non-positive variances and MinT rejects indefinite W") {
    const auto s = summing_matrix(fixtures::three_node());
    CovarianceEstimate d{Vector(vec({1, 0, 2})).asDiagonal(), CovarianceKind::diagonal, 0.0};
    CHECK_THROWS_AS(p_wls(s, d), SingularMatrix);
    Matrix w(3, 3);
    w << 1, 2, 0, 2, 1, 0, 0, 0, 1;
    CHECK_THROWS_AS(p_mint(s, {w, CovarianceKind::sample, 0.0}), SingularMatrix);
}

TEST_CASE("projection methods fix coherent forecasts") {
    std::mt19937_64 rng(9);
    for (const auto& h : {fixtures::three_node(), fixtures::seven_node(), fixtures::fifteen_node()}) {
        const auto s = summing_matrix(h);
        const auto m = s.rows();
        const auto w = fixtures::random_spd(m, rng);
        const Matrix b = (fixtures::random_normal(s.cols(), 3, rng).array().abs() + 1.0).matrix();
        const Matrix coherent = s * b;
        CovarianceEstimate diag{Vector(w.diagonal()).asDiagonal(), CovarianceKind::diagonal, 0.0};
        for (const auto& p : {p_bottom_up(s), p_wls(s, diag), p_mint(s, {w, CovarianceKind::sample, 0.0})}) {
            CHECK((s * p.entries * s - s).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK((p.entries * coherent - b).cwiseAbs().maxCoeff() <= 1e-9 * b.cwiseAbs().maxCoeff());
            CHECK((reconcile(p, s, coherent).values - coherent).cwiseAbs().maxCoeff() <= 1e-9 * coherent.maxCoeff());
        }
    }
}

TEST_CASE("MinT trace is minimal among valid projections") {
    std::mt19937_64 rng(13);
    const auto s = summing_matrix(fixtures::three_node());
    Matrix w = Matrix::Zero(3, 3);
    w.diagonal() = vec({4, 1, 1});
    const auto p = p_mint(s, {w, CovarianceKind::sample, 0.0}).entries;
    const double best = reconciled_trace(s, p, w);
    const auto p0 = p_bottom_up(s).entries;
    CHECK(best <= reconciled_trace(s, p0, w));
    const Matrix complement = Matrix::Identity(3, 3) - s * p0;
    for (int i = 0; i < 1000; ++i) {
        const Matrix candidate = p0 + fixtures::random_normal(2, 3, rng) * complement;
        CHECK((s * candidate * s - s).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(best <= reconciled_trace(s, candidate, w) + 1e-12);
    }
}

TEST_CASE("sample covariance") {
    Matrix same(2, 4);
    same << 1, 1, 1, 1, 2, 2, 2, 2;
    CHECK(estimate_w_sample(same).w.isZero());

    std::mt19937_64 rng(17);
    Matrix r(2, 10);
    r.row(0) = fixtures::random_normal(1, 10, rng);
    r.row(1) = 2.0 * r.row(0);
    const auto w = estimate_w_sample(r).w;
    CHECK(w(1, 1) == doctest::Approx(4.0 * w(0, 0)));
    CHECK(w(0, 1) == doctest::Approx(2.0 * w(0, 0)));

    Matrix hand(3, 5);
    hand << 1, 2, 3, 4, 5, 2, 1, 0, 1, 2, 0, 0, 1, 0, 4;
    // Row means 3, 1.2, 1; sums of centred cross products over n - 1 = 4.
    Matrix expected(3, 3);
    expected << 10.0 / 4, 0.0 / 4, 8.0 / 4, 0.0 / 4, 2.8 / 4, 2.0 / 4, 8.0 / 4, 2.0 / 4, 12.0 / 4;
    const auto got = estimate_w_sample(hand);
    CHECK(got.estimator == CovarianceKind::sample);
    CHECK((got.w - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(estimate_w_sample(Matrix::Ones(2, 1)), InvalidInput);
}

TEST_CASE("short residual history falls back to shrinkage") {
    std::mt19937_64 rng(19);
    const auto got = estimate_w_sample(fixtures::random_normal(6, 4, rng));
    CHECK(got.estimator == CovarianceKind::shrinkage);
}

TEST_CASE("shrinkage estimator") {
    std::mt19937_64 rng(23);
    const auto r = fixtures::random_normal(4, 12, rng);
    const auto sample = estimate_w_sample(r).w;
    const auto full = estimate_w_shrink(r, 1.0);
    CHECK((full.w - Matrix(sample.diagonal().asDiagonal())).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((estimate_w_shrink(r, 0.0).w - sample).cwiseAbs().maxCoeff() <= 1e-12);
    const auto est = estimate_w_shrink(r);
    CHECK(est.estimator == CovarianceKind::shrinkage);
    CHECK(est.shrink_lambda >= 0.0);
    CHECK(est.shrink_lambda <= 1.0);
    CHECK((est.w - est.w.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(Eigen::LLT<Matrix>(est.w).info() == Eigen::Success);

    Matrix flat = r;
    flat.row(2).setConstant(3.0);
    CHECK_THROWS_AS(estimate_w_shrink(flat), InvalidInput);
    CHECK_THROWS_AS(estimate_w_shrink(r.leftCols(2)), InvalidInput);
}

TEST_CASE("shrinkage intensity is large for uncorrelated residuals") {
    int large = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(rep));
        if (estimate_w_shrink(fixtures::random_normal(10, 20, rng)).shrink_lambda > 0.5) ++large;
    }
    MESSAGE("lambda > 0.5 in " << large << " of 100");
    CHECK(large >= 90);
}

TEST_CASE("reconciled variance") {
    const auto s = summing_matrix(fixtures::three_node());
    const auto v = reconciled_variance(s, Matrix::Identity(3, 3));
    CHECK(v.trace() == doctest::Approx(2.0));
    CHECK((v - v.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    std::mt19937_64 rng(29);
    const auto w = fixtures::random_spd(3, rng);
    CHECK((reconciled_variance(s, 3.5 * w) - 3.5 * reconciled_variance(s, w)).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(reconciled_variance(s, w));
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("conventional middle-out") {
    const auto h = fixtures::seven_node();
    const auto panel = panel_from_bottom(h, Matrix::Constant(4, 6, 5.0), Matrix::Ones(4, 6));
    Matrix mid(2, 1);
    mid << 6, 4;
    const auto out = conventional_middle_out(mid, panel, h);
    CHECK(out.values.col(0) == vec({10, 6, 4, 3, 3, 2, 2}));
    CHECK(out.tag == Method::cmo);

    const auto chain = build_hierarchy({{"T", "M"}, {"M", "A"}, {"M", "B"}});
    Matrix sales(2, 2);
    sales << 1, 4, 3, 6;
    const auto small = panel_from_bottom(chain, sales, Matrix::Ones(2, 2));
    Matrix one(1, 1);
    one << 10;
    const auto cmo = conventional_middle_out(one, small, chain);
    const auto gs1 = td_proportions_gs1(small, leaf_group(chain, 1));
    CHECK(cmo.values(2, 0) == doctest::Approx(10 * gs1.values[0]));
    CHECK(cmo.values(3, 0) == doctest::Approx(10 * gs1.values[1]));

    std::mt19937_64 rng(31);
    const auto fig = fixtures::fifteen_node();
    const auto hist = fixtures::random_panel(fig, 30, rng);
    const Matrix f = (fixtures::random_normal(2, 8, rng).array().abs() * 50).matrix();
    const auto big = conventional_middle_out(f, hist, fig);
    CHECK(coherence_error(big, summing_matrix(fig)) <= 1e-12);
    CHECK((big.values.middleRows(1, 2) - f).cwiseAbs().maxCoeff() <= 1e-9 * f.maxCoeff());
}

TEST_CASE("negative bottom estimates are floored and flagged") {
    const auto s = summing_matrix(fixtures::three_node());
    Matrix base(3, 1);
    base << 0, 10, 1;
    const auto r = reconcile(p_mint(s, identity_w(3)), s, base);
    CHECK(r.floored);
    CHECK((r.bottom_estimates.array() >= 0.0).all());
    CHECK(coherence_error(r, s) <= 1e-12);
    CHECK_THROWS_AS(reconcile(p_bottom_up(s), s, Matrix::Ones(2, 1)), InvalidInput);
}

TEST_CASE("CSV exports carry node ids") {
    const auto h = fixtures::three_node();
    const auto s = summing_matrix(h);
    const auto csv = p_matrix_csv(p_bottom_up(s), h);
    CHECK(csv.find("A") != std::string::npos);
    Matrix base(3, 2);
    base << 10, 11, 4, 5, 4, 5;
    const auto out = reconciled_csv(reconcile(p_bottom_up(s), s, base), h);
    CHECK(out.rfind("node_id,horizon,forecast\n", 0) == 0);
    CHECK(out.find("T,1,8\n") != std::string::npos);
}
