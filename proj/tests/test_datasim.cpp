#include "doctest.h"
#include "fixtures.hpp"

#include "hfc/datasim.hpp"

#include <omp.h>

using namespace hfc;

TEST_CASE("degenerate config gives a constant panel") {
    SimConfig c;
    c.proportion_drift = 0.0;
    c.noise_sigma = 0.0;
    c.promo_probability = 0.0;
    const auto sim = simulate(c);
    for (Eigen::Index i = 0; i < sim.panel.sales.rows(); ++i) {
        CHECK((sim.panel.sales.row(i).array() == sim.panel.sales(i, 0)).all());
        CHECK((sim.panel.price.row(i).array() == sim.panel.price(i, 0)).all());
    }
    for (const auto& truth : sim.true_proportions) {
        for (Eigen::Index t = 1; t < truth.rows(); ++t) CHECK(truth.row(t) == truth.row(0));
    }
}

TEST_CASE("simulation is deterministic and coherent") {
    SimConfig c;
    c.seed = 77;
    const auto a = simulate(c);
    const auto b = simulate(c);
    CHECK(a.panel.sales == b.panel.sales);
    CHECK(a.panel.price == b.panel.price);
    CHECK(truth_csv(a) == truth_csv(b));
    CHECK(a.hierarchy.size() == 15);
    CHECK(a.panel.week_count() == 120);
    CHECK(coherence_residual(a.hierarchy, a.panel.sales) <= 1e-12);
    CHECK((a.panel.sales.array() > 0.0).all());
    CHECK((a.panel.price.array() > 0.0).all());
    for (const auto& truth : a.true_proportions) {
        for (Eigen::Index t = 0; t < truth.rows(); ++t) CHECK(std::abs(truth.row(t).sum() - 1.0) <= 1e-12);
    }
    c.seed = 78;
    CHECK(simulate(c).panel.sales != a.panel.sales);
}

TEST_CASE("promo weeks are synchronized within a middle node and discounted") {
    SimConfig c;
    c.seed = 5;
    const auto sim = simulate(c);
    const auto& h = sim.hierarchy;
    for (std::size_t i = 0; i < sim.middle_ids.size(); ++i) {
        const auto leaves = h.leaves_under(h.index_of(sim.middle_ids[i]));
        for (Eigen::Index t = 0; t < sim.panel.week_count(); ++t) {
            const bool promo = sim.promo[i][static_cast<std::size_t>(t)];
            const auto leaf = static_cast<Eigen::Index>(leaves[0]);
            const double list = sim.panel.price(leaf, 0) / (sim.promo[i][0] ? 1.0 - c.promo_discount : 1.0);
            CHECK(sim.panel.price(leaf, t) == doctest::Approx(promo ? list * (1.0 - c.promo_discount) : list));
        }
    }
}

TEST_CASE("promo shift of the true proportions equals the configured drift") {
    SimConfig c;
    c.n_weeks = 1000;
    c.proportion_drift = 0.2;
    c.seed = 9;
    const auto sim = simulate(c);
    for (std::size_t i = 0; i < sim.true_proportions.size(); ++i) {
        const auto& truth = sim.true_proportions[i];
        Vector on = Vector::Zero(truth.cols()), off = on;
        int n_on = 0, n_off = 0;
        for (Eigen::Index t = 0; t < truth.rows(); ++t) {
            if (sim.promo[i][static_cast<std::size_t>(t)]) {
                on += truth.row(t).transpose();
                ++n_on;
            } else {
                off += truth.row(t).transpose();
                ++n_off;
            }
        }
        REQUIRE(n_on > 50);
        const double shift = 0.5 * (on / n_on - off / n_off).cwiseAbs().sum();
        CHECK(shift == doctest::Approx(0.2).epsilon(0.1));
    }
}

TEST_CASE("batch simulation") {
    SimConfig c;
    const auto one = simulate_batch(c, 1, 123);
    REQUIRE(one.size() == 1);
    CHECK(one[0].group_id == "group_01");
    const auto direct = simulate(group_config(c, derive_seed(123, "group_01")));
    CHECK(one[0].panel.sales == direct.panel.sales);

    omp_set_num_threads(4);
    const auto all = simulate_batch(c, 61, 123);
    omp_set_num_threads(1);
    const auto serial = simulate_batch(c, 61, 123);
    REQUIRE(all.size() == 61);
    CHECK(all[60].group_id == "group_61");
    Eigen::Index observations = 0;
    for (std::size_t g = 0; g < all.size(); ++g) {
        observations += all[g].panel.sales.size();
        CHECK(all[g].panel.sales == serial[g].panel.sales);
    }
    CHECK(observations == 15 * 120 * 61);
    CHECK(observations >= 90000);
    CHECK(all[0].panel.sales != all[1].panel.sales);
    CHECK_THROWS_AS(simulate_batch(c, 0, 1), InvalidInput);
}

TEST_CASE("sim config validation and JSON") {
    SimConfig c;
    c.proportion_drift = 0.13;
    c.n_weeks = 64;
    const auto back = sim_config_from_json(sim_config_to_json(c));
    CHECK(back.proportion_drift == 0.13);
    CHECK(back.n_weeks == 64);

    auto bad = [](const char* key, nlohmann::json value) {
        nlohmann::json doc{{key, value}};
        CHECK_THROWS_WITH_AS(sim_config_from_json(doc), doctest::Contains(key), InvalidInput);
    };
    bad("promo_probability", 1.5);
    bad("n_weeks", 20);
    bad("children_per_middle", 1);
    bad("proportion_drift", 0.6);
    bad("promo_discount", 1.0);
    bad("mystery", 1);
}

TEST_CASE("truth CSV lists every week, middle node and child") {
    SimConfig c;
    c.n_weeks = 30;
    const auto sim = simulate(c);
    const auto csv = truth_csv(sim);
    CHECK(csv.rfind("week,middle_node,child,true_proportion,promo_flag\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 30 * 12);
    CHECK(csv.find("\n1,R1,R1_DC01,") != std::string::npos);
}
