#include "hfc/run_config.hpp"

#include "hfc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;

namespace hfc {

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (fs::path(base_dir) / p).lexically_normal().string();
}

std::string grid_name(GridProfile g) { return g == GridProfile::paper ? "paper" : "compact"; }

}  // namespace

GridProfile parse_grid_profile(const std::string& name) {
    if (name == "paper") return GridProfile::paper;
    if (name == "compact") return GridProfile::compact;
    throw InvalidInput("unknown grid profile '" + name + "' (valid: paper, compact)");
}

std::vector<Method> parse_method_list(const std::string& csv) {
    std::vector<Method> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        const auto m = parse_method(item);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw InvalidInput("method list is empty");
    return out;
}

void RunConfig::validate() const {
    const int sources = (simulation ? 1 : 0) + (data_dir ? 1 : 0) + (panel_path || hierarchy_path ? 1 : 0);
    if (sources != 1) throw InvalidInput("config: give exactly one of simulation, data_dir or hierarchy+panel");
    if ((panel_path && !hierarchy_path) || (hierarchy_path && !panel_path)) {
        throw InvalidInput("config: hierarchy and panel must be given together");
    }
    if (base_forecasts_path && !panel_path) throw InvalidInput("config: base_forecasts needs hierarchy+panel");
    if (methods.empty()) throw InvalidInput("config: method list is empty");
    if (train_weeks < 1) throw InvalidInput("config: train_weeks must be >= 1");
    if (horizon < 1) throw InvalidInput("config: horizon must be >= 1");
    if (jobs < 1) throw InvalidInput("config: jobs must be >= 1");
    if (n_groups < 1) throw InvalidInput("config: n_groups must be >= 1");
    if (dhf.lags < 0) throw InvalidInput("config: dhf.lags must be >= 0");
    if (dhf.folds < 1) throw InvalidInput("config: dhf.folds must be >= 1");
    if (simulation && train_weeks + horizon > simulation->n_weeks) {
        throw InvalidInput("config: train_weeks + horizon exceeds simulated n_weeks");
    }
}

PipelineOptions RunConfig::pipeline_options() const {
    PipelineOptions o;
    o.methods = methods;
    o.train_weeks = train_weeks;
    o.horizon = horizon;
    o.seed = seed;
    o.dhf = dhf;
    o.jobs = jobs;
    return o;
}

RunConfig run_config_from_json(const nlohmann::json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw InvalidInput("config: expected a JSON object");
    RunConfig c;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "note") continue;
            else if (key == "hierarchy") c.hierarchy_path = resolve(base_dir, value.get<std::string>());
            else if (key == "panel") c.panel_path = resolve(base_dir, value.get<std::string>());
            else if (key == "base_forecasts") c.base_forecasts_path = resolve(base_dir, value.get<std::string>());
            else if (key == "data_dir") c.data_dir = resolve(base_dir, value.get<std::string>());
            else if (key == "simulation") c.simulation = sim_config_from_json(value);
            else if (key == "n_groups") c.n_groups = value.get<int>();
            else if (key == "methods") {
                c.methods.clear();
                for (const auto& m : value) {
                    const auto method = parse_method(m.get<std::string>());
                    if (std::find(c.methods.begin(), c.methods.end(), method) == c.methods.end()) {
                        c.methods.push_back(method);
                    }
                }
            } else if (key == "train_weeks") c.train_weeks = value.get<int>();
            else if (key == "horizon") c.horizon = value.get<int>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "out") c.out = resolve(base_dir, value.get<std::string>());
            else if (key == "jobs") c.jobs = value.get<int>();
            else if (key == "dhf") {
                for (const auto& [k, v] : value.items()) {
                    if (k == "lags") c.dhf.lags = v.get<int>();
                    else if (k == "folds") c.dhf.folds = v.get<int>();
                    else if (k == "grid") c.dhf.grid = parse_grid_profile(v.get<std::string>());
                    else if (k == "search") {
                        const auto s = v.get<std::string>();
                        if (s == "greedy") c.dhf.search = SearchMode::greedy;
                        else if (s == "exhaustive") c.dhf.search = SearchMode::exhaustive;
                        else throw InvalidInput("config: dhf.search must be greedy or exhaustive");
                    } else throw InvalidInput("config: unknown key 'dhf." + k + "'");
                }
            } else throw InvalidInput("config: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    if (!doc.contains("out")) c.out = resolve(base_dir, c.out);
    c.validate();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("config " + path + ": " + e.what());
    }
    const auto base_dir = fs::path(path).parent_path().string();
    if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) {
        return run_config_from_json(doc.at("config"), base_dir.empty() ? "." : base_dir);
    }
    return run_config_from_json(doc, base_dir.empty() ? "." : base_dir);
}

nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json doc;
    if (c.hierarchy_path) doc["hierarchy"] = *c.hierarchy_path;
    if (c.panel_path) doc["panel"] = *c.panel_path;
    if (c.base_forecasts_path) doc["base_forecasts"] = *c.base_forecasts_path;
    if (c.data_dir) doc["data_dir"] = *c.data_dir;
    if (c.simulation) {
        auto sim = sim_config_to_json(*c.simulation);
        doc["simulation"] = sim;
        doc["n_groups"] = c.n_groups;
    }
    std::vector<std::string> names;
    for (auto m : c.methods) names.emplace_back(method_name(m));
    doc["methods"] = names;
    doc["train_weeks"] = c.train_weeks;
    doc["horizon"] = c.horizon;
    doc["seed"] = c.seed;
    doc["out"] = c.out;
    doc["jobs"] = c.jobs;
    doc["dhf"] = {{"lags", c.dhf.lags},
                  {"folds", c.dhf.folds},
                  {"grid", grid_name(c.dhf.grid)},
                  {"search", c.dhf.search == SearchMode::greedy ? "greedy" : "exhaustive"}};
    return doc;
}

std::string config_hash(const RunConfig& config) {
    // Thread count and output location do not change results.
    auto doc = run_config_to_json(config);
    doc.erase("jobs");
    doc.erase("out");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
    return buf;
}

nlohmann::json manifest(const RunConfig& config, const std::string& command) {
    return {{"tool", "hfc"},
            {"version", kVersion},
            {"command", command},
            {"seed", config.seed},
            {"config_hash", config_hash(config)},
            {"config", run_config_to_json(config)}};
}

Matrix read_base_forecasts_csv(const std::string& path, const Hierarchy& hierarchy, int horizon) {
    const auto table = read_csv(path, {"node_id", "horizon", "forecast"});
    const auto m = static_cast<Eigen::Index>(hierarchy.size());
    Matrix out = Matrix::Constant(m, horizon, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto where = path + ":" + std::to_string(table.line_numbers[r]);
        const auto idx = hierarchy.find(row[0]);
        if (!idx) throw InvalidInput(where + ": unknown node '" + row[0] + "'");
        const auto h = parse_integer(row[1], "horizon");
        if (h < 1 || h > horizon) throw InvalidInput(where + ": horizon out of range 1.." + std::to_string(horizon));
        out(static_cast<Eigen::Index>(*idx), static_cast<Eigen::Index>(h - 1)) = parse_double(row[2], "forecast");
    }
    if (out.hasNaN()) throw InvalidInput(path + ": base forecasts do not cover every node and horizon");
    return out;
}

std::vector<GroupData> load_groups(const RunConfig& config) {
    std::vector<GroupData> groups;
    if (config.simulation) {
        for (auto& sim : simulate_batch(*config.simulation, config.n_groups, config.seed)) {
            groups.push_back({sim.group_id, std::move(sim.hierarchy), std::move(sim.panel), std::nullopt});
        }
        return groups;
    }
    auto load_one = [&](const std::string& id, const std::string& hier_path, const std::string& panel_path) {
        if (!fs::exists(hier_path)) throw IoError("missing hierarchy file: " + hier_path);
        if (!fs::exists(panel_path)) throw IoError("missing panel file: " + panel_path);
        auto h = build_hierarchy(read_edges_csv(hier_path));
        auto panel = read_panel_csv(panel_path, h);
        return GroupData{id, std::move(h), std::move(panel), std::nullopt};
    };
    if (config.data_dir) {
        if (!fs::is_directory(*config.data_dir)) throw IoError("missing data directory: " + *config.data_dir);
        std::vector<std::string> dirs;
        for (const auto& entry : fs::directory_iterator(*config.data_dir)) {
            if (entry.is_directory() && fs::exists(entry.path() / "panel.csv")) {
                dirs.push_back(entry.path().filename().string());
            }
        }
        std::sort(dirs.begin(), dirs.end());
        if (dirs.empty()) throw IoError("no group directories with panel.csv under " + *config.data_dir);
        for (const auto& d : dirs) {
            const auto root = fs::path(*config.data_dir) / d;
            groups.push_back(load_one(d, (root / "hierarchy.csv").string(), (root / "panel.csv").string()));
        }
        return groups;
    }
    auto g = load_one(fs::path(*config.panel_path).stem().string(), *config.hierarchy_path, *config.panel_path);
    if (config.base_forecasts_path) {
        if (!fs::exists(*config.base_forecasts_path)) {
            throw IoError("missing base forecast file: " + *config.base_forecasts_path);
        }
        g.base_override = read_base_forecasts_csv(*config.base_forecasts_path, g.hierarchy, config.horizon);
    }
    groups.push_back(std::move(g));
    return groups;
}

}  // namespace hfc
