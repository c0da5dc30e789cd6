#include "hfc/datasim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

namespace hfc {

void SimConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw InvalidInput("sim config: " + field + " " + why);
    };
    if (middle_count < 1) fail("middle_count", "must be >= 1");
    if (children_per_middle < 2) fail("children_per_middle", "must be >= 2");
    if (n_weeks < 30) fail("n_weeks", "must be >= 30");
    if (!(base_level_min > 0.0)) fail("base_level_min", "must be positive");
    if (!(base_level_max >= base_level_min)) fail("base_level_max", "must be >= base_level_min");
    if (!(list_price > 0.0)) fail("list_price", "must be positive");
    if (!(price_jitter >= 0.0 && price_jitter < 1.0)) fail("price_jitter", "must be in [0, 1)");
    if (!(promo_probability >= 0.0 && promo_probability <= 1.0)) fail("promo_probability", "must be in [0, 1]");
    if (!(promo_discount > 0.0 && promo_discount < 1.0)) fail("promo_discount", "must be in (0, 1)");
    if (!std::isfinite(uplift_log_mean)) fail("uplift_log_mean", "must be finite");
    if (!(uplift_log_sigma >= 0.0)) fail("uplift_log_sigma", "must be >= 0");
    if (!(proportion_drift >= 0.0 && proportion_drift < 0.5)) fail("proportion_drift", "must be in [0, 0.5)");
    if (!(noise_sigma >= 0.0)) fail("noise_sigma", "must be >= 0");
}

nlohmann::json sim_config_to_json(const SimConfig& c) {
    return {{"middle_count", c.middle_count},
            {"children_per_middle", c.children_per_middle},
            {"n_weeks", c.n_weeks},
            {"base_level_min", c.base_level_min},
            {"base_level_max", c.base_level_max},
            {"list_price", c.list_price},
            {"price_jitter", c.price_jitter},
            {"promo_probability", c.promo_probability},
            {"promo_discount", c.promo_discount},
            {"uplift_log_mean", c.uplift_log_mean},
            {"uplift_log_sigma", c.uplift_log_sigma},
            {"proportion_drift", c.proportion_drift},
            {"noise_sigma", c.noise_sigma},
            {"seed", c.seed}};
}

SimConfig sim_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InvalidInput("sim config: expected a JSON object");
    SimConfig c;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "note") continue;
            else if (key == "middle_count") c.middle_count = value.get<int>();
            else if (key == "children_per_middle") c.children_per_middle = value.get<int>();
            else if (key == "n_weeks") c.n_weeks = value.get<int>();
            else if (key == "base_level_min") c.base_level_min = value.get<double>();
            else if (key == "base_level_max") c.base_level_max = value.get<double>();
            else if (key == "list_price") c.list_price = value.get<double>();
            else if (key == "price_jitter") c.price_jitter = value.get<double>();
            else if (key == "promo_probability") c.promo_probability = value.get<double>();
            else if (key == "promo_discount") c.promo_discount = value.get<double>();
            else if (key == "uplift_log_mean") c.uplift_log_mean = value.get<double>();
            else if (key == "uplift_log_sigma") c.uplift_log_sigma = value.get<double>();
            else if (key == "proportion_drift") c.proportion_drift = value.get<double>();
            else if (key == "noise_sigma") c.noise_sigma = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else throw InvalidInput("sim config: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("sim config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

std::string padded(int value, int width) {
    std::string s = std::to_string(value);
    if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    return s;
}

std::string middle_id(int i) { return "R" + std::to_string(i + 1); }
std::string child_id(int i, int j) { return middle_id(i) + "_DC" + padded(j + 1, 2); }

// Promo-week shares: the lighter half U of the children gains `drift` of total
// share in proportion to their baseline, the heavier half V loses it likewise.
std::vector<double> promo_shares(const std::vector<double>& base, double drift) {
    const auto n = base.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return base[a] < base[b]; });
    std::vector<bool> gains(n, false);
    for (std::size_t r = 0; r < n / 2; ++r) gains[order[r]] = true;
    double p_u = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (gains[j]) p_u += base[j];
    }
    const double p_v = 1.0 - p_u;
    std::vector<double> q(n);
    for (std::size_t j = 0; j < n; ++j) {
        q[j] = gains[j] ? base[j] * (1.0 + drift / p_u) : base[j] * (1.0 - drift / p_v);
    }
    const double total = std::accumulate(q.begin(), q.end(), 0.0);
    for (auto& v : q) v /= total;
    return q;
}

}  // namespace

Hierarchy sim_hierarchy(const SimConfig& config) {
    std::vector<Edge> edges;
    for (int i = 0; i < config.middle_count; ++i) {
        edges.emplace_back("Total", middle_id(i));
        for (int j = 0; j < config.children_per_middle; ++j) edges.emplace_back(middle_id(i), child_id(i, j));
    }
    return Hierarchy::from_edges(edges);
}

SimOutput simulate(const SimConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SimOutput out;
    out.hierarchy = sim_hierarchy(config);
    const auto& h = out.hierarchy;
    const auto n = static_cast<Eigen::Index>(config.n_weeks);
    const auto k = static_cast<std::size_t>(config.children_per_middle);
    Matrix bottom_sales(static_cast<Eigen::Index>(h.bottom_count()), n);
    Matrix bottom_price(bottom_sales.rows(), n);

    for (int i = 0; i < config.middle_count; ++i) {
        std::vector<double> base(k), list(k);
        for (std::size_t j = 0; j < k; ++j) {
            base[j] = config.base_level_min + (config.base_level_max - config.base_level_min) * unit(rng);
            list[j] = config.list_price * (1.0 + config.price_jitter * (2.0 * unit(rng) - 1.0));
        }
        const double level = std::accumulate(base.begin(), base.end(), 0.0);
        std::vector<double> p(k);
        for (std::size_t j = 0; j < k; ++j) p[j] = base[j] / level;
        const auto q = promo_shares(p, config.proportion_drift);

        std::vector<Eigen::Index> rows(k);
        for (std::size_t j = 0; j < k; ++j) {
            rows[j] = static_cast<Eigen::Index>(h.bottom_position(h.index_of(child_id(i, static_cast<int>(j)))));
        }

        Matrix truth(n, static_cast<Eigen::Index>(k));
        std::vector<bool> promo(static_cast<std::size_t>(n));
        for (Eigen::Index t = 0; t < n; ++t) {
            const bool on = unit(rng) < config.promo_probability;
            promo[static_cast<std::size_t>(t)] = on;
            double demand = level * std::exp(config.noise_sigma * gauss(rng));
            if (on) demand *= std::exp(config.uplift_log_mean + config.uplift_log_sigma * gauss(rng));
            const auto& shares = on ? q : p;
            std::vector<double> realized(k);
            double total = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                realized[j] = shares[j] * std::exp(config.noise_sigma * gauss(rng));
                total += realized[j];
            }
            for (std::size_t j = 0; j < k; ++j) {
                truth(t, static_cast<Eigen::Index>(j)) = shares[j];
                bottom_sales(rows[j], t) = demand * realized[j] / total;
                bottom_price(rows[j], t) = list[j] * (on ? 1.0 - config.promo_discount : 1.0);
            }
        }
        out.middle_ids.push_back(middle_id(i));
        out.true_proportions.push_back(std::move(truth));
        out.promo.push_back(std::move(promo));
    }
    out.panel = panel_from_bottom(h, bottom_sales, bottom_price);
    return out;
}

SimConfig group_config(const SimConfig& tmpl, std::uint64_t group_seed) {
    SimConfig c = tmpl;
    std::mt19937_64 rng(derive_seed(group_seed, "jitter"));
    std::uniform_real_distribution<double> scale(0.5, 2.0), lift(0.8, 1.2);
    const double s = scale(rng);
    c.base_level_min = tmpl.base_level_min * s;
    c.base_level_max = tmpl.base_level_max * s;
    c.uplift_log_mean = tmpl.uplift_log_mean * lift(rng);
    c.seed = group_seed;
    return c;
}

std::string group_id(int index, int n_groups) {
    const int width = std::max(2, static_cast<int>(std::to_string(n_groups).size()));
    return "group_" + padded(index + 1, width);
}

std::vector<SimOutput> simulate_batch(const SimConfig& tmpl, int n_groups, std::uint64_t seed) {
    if (n_groups < 1) throw InvalidInput("simulate_batch: n_groups must be >= 1");
    tmpl.validate();
    std::vector<SimOutput> out(static_cast<std::size_t>(n_groups));
#pragma omp parallel for schedule(dynamic)
    for (int g = 0; g < n_groups; ++g) {
        const auto id = group_id(g, n_groups);
        auto sim = simulate(group_config(tmpl, derive_seed(seed, id)));
        sim.group_id = id;
        out[static_cast<std::size_t>(g)] = std::move(sim);
    }
    return out;
}

std::string truth_csv(const SimOutput& output) {
    std::ostringstream s;
    s << "week,middle_node,child,true_proportion,promo_flag\n";
    const auto& h = output.hierarchy;
    const auto weeks = output.true_proportions.empty() ? 0 : output.true_proportions.front().rows();
    for (Eigen::Index t = 0; t < weeks; ++t) {
        for (std::size_t i = 0; i < output.middle_ids.size(); ++i) {
            const auto& children = h.node(h.index_of(output.middle_ids[i])).children;
            for (std::size_t j = 0; j < children.size(); ++j) {
                s << output.panel.weeks[static_cast<std::size_t>(t)] << ',' << output.middle_ids[i] << ','
                  << h.node(children[j]).id << ','
                  << format_double(output.true_proportions[i](t, static_cast<Eigen::Index>(j))) << ','
                  << (output.promo[i][static_cast<std::size_t>(t)] ? 1 : 0) << '\n';
            }
        }
    }
    return s.str();
}

}  // namespace hfc
