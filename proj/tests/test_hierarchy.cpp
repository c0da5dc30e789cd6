#include "doctest.h"
#include "fixtures.hpp"

#include "hfc/io.hpp"

#include <filesystem>

using namespace hfc;

TEST_CASE("Fig. 1 edges give 15 nodes on 3 levels with 12 leaves") {
    const auto h = fixtures::fifteen_node();
    CHECK(h.size() == 15);
    CHECK(h.level_count() == 3);
    CHECK(h.bottom_count() == 12);
    CHECK(h.node(0).id == "Total");
    CHECK(h.node(1).id == "R1");
    CHECK(h.node(2).id == "R2");
    CHECK(h.node(3).id == "R1_DC01");
}

TEST_CASE("single edge is a two-level chain") {
    const auto h = build_hierarchy({{"T", "A"}});
    CHECK(h.size() == 2);
    CHECK(h.level_count() == 2);
    CHECK(h.bottom_count() == 1);
}

TEST_CASE("invalid edge lists are rejected") {
    CHECK_THROWS_WITH_AS(build_hierarchy({{"T", "A"}, {"T", "B"}, {"A", "T"}}), doctest::Contains("cycle"),
                         InvalidInput);
    CHECK_THROWS_WITH_AS(build_hierarchy({{"T", "A"}, {"U", "B"}}), doctest::Contains("root"), InvalidInput);
    CHECK_THROWS_WITH_AS(build_hierarchy({{"T", "A"}, {"T", "B"}, {"A", "C"}}), doctest::Contains("ragged"),
                         InvalidInput);
    CHECK_THROWS_WITH_AS(build_hierarchy({{"T", "A"}, {"T", "A"}}), doctest::Contains("duplicate"), InvalidInput);
    CHECK_THROWS_AS(build_hierarchy({}), InvalidInput);
    CHECK_THROWS_AS(build_hierarchy({{"T", "T"}}), InvalidInput);
    CHECK_THROWS_AS(build_hierarchy({{"T", "A"}, {"T", "B"}, {"B", "C"}, {"A", "C"}}), InvalidInput);
}

TEST_CASE("node order does not depend on edge order") {
    auto edges = fixtures::fig1_edges();
    const auto a = build_hierarchy(edges);
    std::reverse(edges.begin(), edges.end());
    const auto b = build_hierarchy(edges);
    CHECK(a.ids() == b.ids());
    CHECK(build_hierarchy(a.edges()).ids() == a.ids());
}

TEST_CASE("summing matrix examples") {
    SUBCASE("three nodes") {
        Matrix expected(3, 2);
        expected << 1, 1, 1, 0, 0, 1;
        CHECK(summing_matrix(fixtures::three_node()) == expected);
    }
    SUBCASE("seven nodes, column sums 3") {
        const auto s = summing_matrix(fixtures::seven_node());
        CHECK(s.rows() == 7);
        CHECK(s.cols() == 4);
        for (Eigen::Index j = 0; j < 4; ++j) CHECK(s.col(j).sum() == 3.0);
    }
    SUBCASE("Fig. 1") {
        const auto h = fixtures::fifteen_node();
        const auto s = summing_matrix(h);
        CHECK(s.rows() == 15);
        CHECK(s.cols() == 12);
        CHECK(s.row(0).sum() == 12.0);
        CHECK(s.row(1).sum() == 6.0);
        CHECK(s.row(2).sum() == 6.0);
    }
}

TEST_CASE("summing matrix invariants hold on every fixture hierarchy") {
    for (const auto& h : {fixtures::three_node(), fixtures::seven_node(), fixtures::fifteen_node(),
                          build_hierarchy({{"T", "A"}})}) {
        const auto s = summing_matrix(h);
        const auto k = static_cast<Eigen::Index>(h.bottom_count());
        const auto m = static_cast<Eigen::Index>(h.size());
        CHECK(s.bottomRows(k) == Matrix::Identity(k, k));
        CHECK(s.row(0) == Matrix::Ones(1, k));
        for (Eigen::Index j = 0; j < k; ++j) CHECK(s.col(j).sum() == h.level_count());
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h.node(i).children.empty()) continue;
            Matrix sum = Matrix::Zero(1, k);
            for (auto c : h.node(i).children) sum += s.row(static_cast<Eigen::Index>(c));
            CHECK(s.row(static_cast<Eigen::Index>(i)) == sum);
        }
        CHECK(m == static_cast<Eigen::Index>(h.size()));
    }
}

TEST_CASE("aggregate_panel examples") {
    Matrix s(3, 2);
    s << 1, 1, 1, 0, 0, 1;
    Matrix bottom(2, 1);
    bottom << 1, 2;
    Matrix expected(3, 1);
    expected << 3, 1, 2;
    CHECK(aggregate_panel(bottom, s) == expected);

    const auto big = summing_matrix(fixtures::fifteen_node());
    const auto top = aggregate_panel(Matrix::Ones(12, 5), big);
    CHECK(top.row(0) == Matrix::Constant(1, 5, 12.0));
    CHECK(aggregate_panel(Matrix::Zero(12, 5), big).isZero());
    CHECK_THROWS_AS(aggregate_panel(Matrix::Ones(3, 5), big), InvalidInput);
}

TEST_CASE("aggregated random panels are coherent") {
    std::mt19937_64 rng(7);
    const auto h = fixtures::fifteen_node();
    for (int rep = 0; rep < 10; ++rep) {
        const auto panel = fixtures::random_panel(h, 30, rng);
        CHECK(coherence_residual(h, panel.sales) <= 1e-12);
    }
}

TEST_CASE("aggregate price is sales weighted, unweighted when children sell nothing") {
    const auto h = fixtures::three_node();
    Matrix sales(2, 2), price(2, 2);
    sales << 1, 0, 3, 0;
    price << 2, 2, 4, 6;
    const auto panel = panel_from_bottom(h, sales, price);
    CHECK(panel.price(0, 0) == doctest::Approx((1 * 2 + 3 * 4) / 4.0));
    CHECK(panel.price(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("hierarchy and panel CSV round trip") {
    const auto dir = fixtures::temp_dir("hier_io");
    std::mt19937_64 rng(3);
    const auto h = fixtures::seven_node();
    const auto panel = fixtures::random_panel(h, 12, rng);
    write_edges_csv(dir + "/h.csv", h);
    write_panel_csv(dir + "/p.csv", panel);
    const auto h2 = build_hierarchy(read_edges_csv(dir + "/h.csv"));
    CHECK(h2.ids() == h.ids());
    const auto p2 = read_panel_csv(dir + "/p.csv", h2);
    CHECK(p2.sales == panel.sales);
    CHECK(p2.price == panel.price);
}

TEST_CASE("panel loader rejects gaps, duplicates and incoherent aggregates") {
    const auto dir = fixtures::temp_dir("panel_bad");
    const auto h = fixtures::three_node();
    auto write = [&](const std::string& body) {
        write_file_atomic(dir + "/p.csv", "week,node_id,sales,price\n" + body);
        return dir + "/p.csv";
    };
    CHECK_NOTHROW(read_panel_csv(write("1,T,3,1\n1,A,1,1\n1,B,2,1\n"), h));
    CHECK_THROWS_WITH_AS(read_panel_csv(write("1,T,3,1\n1,A,1,1\n"), h), doctest::Contains("missing"), InvalidInput);
    CHECK_THROWS_AS(read_panel_csv(write("1,T,3,1\n1,A,1,1\n1,B,2,1\n1,B,2,1\n"), h), InvalidInput);
    CHECK_THROWS_AS(read_panel_csv(write("1,T,4,1\n1,A,1,1\n1,B,2,1\n"), h), InvalidInput);
    CHECK_THROWS_AS(read_panel_csv(write("1,T,3,1\n1,A,1,0\n1,B,2,1\n"), h), InvalidInput);
    CHECK_THROWS_AS(read_panel_csv(write("1,T,3,1\n1,A,1,1\n1,Z,2,1\n"), h), InvalidInput);
    CHECK_THROWS_AS(read_panel_csv(dir + "/nope.csv", h), IoError);
}
