#pragma once

#include "hfc/panel.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hfc {

/**
 * Synthetic promotional sales generator settings.
 *
 * Shape: Total -> R1..R{middle_count} -> R{i}_DC01..; every middle node has
 * `children_per_middle` leaves. Defaults are guesses; the real data is not
 * characterized anywhere.
 *
 * `proportion_drift` is the total-variation distance between a middle node's
 * baseline child shares and its promo-week shares. The lighter half of the
 * children gains share during promotions, so the drift must stay below 0.5.
 */
struct SimConfig {
    int middle_count = 2;
    int children_per_middle = 6;
    int n_weeks = 120;
    double base_level_min = 50.0;
    double base_level_max = 200.0;
    double list_price = 4.0;
    double price_jitter = 0.1;
    double promo_probability = 0.15;
    double promo_discount = 0.3;
    double uplift_log_mean = 0.7;
    double uplift_log_sigma = 0.25;
    double proportion_drift = 0.2;
    double noise_sigma = 0.15;
    std::uint64_t seed = 42;

    /// Throws InvalidInput naming the offending field.
    void validate() const;
};

nlohmann::json sim_config_to_json(const SimConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
SimConfig sim_config_from_json(const nlohmann::json& doc);

struct SimOutput {
    std::string group_id;
    Hierarchy hierarchy;
    SeriesPanel panel;
    std::vector<std::string> middle_ids;
    std::vector<Matrix> true_proportions;  // per middle node: weeks x children
    std::vector<std::vector<bool>> promo;  // middle nodes x weeks
};

/// Fig. 1 style tree for the configured shape.
Hierarchy sim_hierarchy(const SimConfig& config);

SimOutput simulate(const SimConfig& config);

/// Template with the group's own seed and jittered base levels and uplift.
SimConfig group_config(const SimConfig& tmpl, std::uint64_t group_seed);
std::string group_id(int index, int n_groups);

/// `n_groups` independent panels; group g uses derive_seed(seed, group_id(g)).
std::vector<SimOutput> simulate_batch(const SimConfig& tmpl, int n_groups, std::uint64_t seed);

/// week,middle_node,child,true_proportion,promo_flag
std::string truth_csv(const SimOutput& output);

}  // namespace hfc
