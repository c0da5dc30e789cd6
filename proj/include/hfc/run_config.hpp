#pragma once

#include "hfc/datasim.hpp"
#include "hfc/pipeline.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hfc {

inline constexpr const char* kVersion = "1.0.0";

/**
 * One JSON document describing a run. Exactly one data source is used:
 * `simulation` (generated in memory), `data_dir` (one subdirectory per group
 * holding hierarchy.csv and panel.csv) or `hierarchy` + `panel` for a single
 * group. Relative paths resolve against the config file's directory.
 */
struct RunConfig {
    std::optional<std::string> hierarchy_path;
    std::optional<std::string> panel_path;
    std::optional<std::string> base_forecasts_path;
    std::optional<std::string> data_dir;
    std::optional<SimConfig> simulation;
    int n_groups = 61;

    std::vector<Method> methods = all_methods();
    int train_weeks = 112;
    int horizon = 8;
    std::uint64_t seed = 42;
    std::string out = "out";
    int jobs = 1;
    DhfOptions dhf;

    void validate() const;
    PipelineOptions pipeline_options() const;
};

RunConfig run_config_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
/// A manifest document (with a "config" member) is accepted as well.
RunConfig load_run_config(const std::string& path);
/// Effective config with resolved paths; stable key order.
nlohmann::json run_config_to_json(const RunConfig& config);

/// FNV-1a of the effective config, 16 hex digits.
std::string config_hash(const RunConfig& config);
nlohmann::json manifest(const RunConfig& config, const std::string& command);

std::vector<Method> parse_method_list(const std::string& csv);
GridProfile parse_grid_profile(const std::string& name);

/// Groups described by the config's data source, in a stable order.
std::vector<GroupData> load_groups(const RunConfig& config);
/// Reads `node_id,horizon,forecast` into an m x H matrix in node order.
Matrix read_base_forecasts_csv(const std::string& path, const Hierarchy& hierarchy, int horizon);

}  // namespace hfc
