// hfc: simulate panels, forecast, reconcile and score hierarchical methods.

#include "hfc/io.hpp"
#include "hfc/run_config.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hfc;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<std::string> methods;
    std::optional<std::string> input;
};

/// Usage problems detected after parsing (bad method names, bad config values).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig effective_config(const Overrides& o) {
    RunConfig c;
    try {
        c = load_run_config(o.config);
        if (o.seed) c.seed = *o.seed;
        if (o.out) c.out = fs::absolute(*o.out).lexically_normal().string();
        if (o.jobs) c.jobs = *o.jobs;
        if (o.methods) c.methods = parse_method_list(*o.methods);
        c.validate();
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    return c;
}

void make_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_manifest(const RunConfig& c, const std::string& command) {
    write_file_atomic((fs::path(c.out) / "manifest.json").string(), manifest(c, command).dump(2) + "\n");
}

int report_failures(const std::vector<GroupRun>& runs) {
    int count = 0;
    for (const auto& run : runs) {
        for (const auto& f : run.failures) {
            std::cerr << "error: method " << method_name(f.method) << " group " << f.group << ": " << f.message << '\n';
            ++count;
        }
    }
    return count;
}

int cmd_simulate(const Overrides& o) {
    const auto c = effective_config(o);
    if (!c.simulation) throw UsageError("simulate: config has no simulation section");
    make_dir(c.out);
    const auto sims = simulate_batch(*c.simulation, c.n_groups, c.seed);
    for (const auto& sim : sims) {
        const auto dir = fs::path(c.out) / sim.group_id;
        make_dir(dir.string());
        write_edges_csv((dir / "hierarchy.csv").string(), sim.hierarchy);
        write_panel_csv((dir / "panel.csv").string(), sim.panel);
        write_file_atomic((dir / "truth.csv").string(), truth_csv(sim));
    }
    write_manifest(c, "simulate");
    std::cout << "wrote " << sims.size() << " groups to " << c.out << '\n';
    return 0;
}

int cmd_forecast(const Overrides& o) {
    const auto c = effective_config(o);
    const auto groups = load_groups(c);
    make_dir(c.out);
    const auto runs = run_groups(groups, c.pipeline_options());

    std::ostringstream fc, coh;
    fc << "group,method,node_id,horizon,forecast\n";
    coh << "group,method,max_relative_residual\n";
    double worst = 0.0;
    for (std::size_t g = 0; g < runs.size(); ++g) {
        const auto& h = groups[g].hierarchy;
        const Matrix s = summing_matrix(h);
        for (auto method : c.methods) {
            auto it = runs[g].forecasts.find(method);
            if (it == runs[g].forecasts.end()) continue;
            const auto& values = it->second.values;
            for (std::size_t i = 0; i < h.size(); ++i) {
                for (Eigen::Index t = 0; t < values.cols(); ++t) {
                    fc << runs[g].group_id << ',' << method_name(method) << ',' << h.node(i).id << ',' << t + 1 << ','
                       << format_double(values(static_cast<Eigen::Index>(i), t)) << '\n';
                }
            }
            const double err = coherence_error(it->second, s);
            worst = std::max(worst, err);
            coh << runs[g].group_id << ',' << method_name(method) << ',' << format_double(err) << '\n';
        }
    }
    write_file_atomic((fs::path(c.out) / "forecasts.csv").string(), fc.str());
    write_file_atomic((fs::path(c.out) / "coherence.csv").string(), coh.str());
    write_manifest(c, "forecast");
    std::cout << "coherence: max relative residual " << format_double(worst) << '\n';
    return report_failures(runs) == 0 ? 0 : 1;
}

int cmd_evaluate(const Overrides& o) {
    const auto c = effective_config(o);
    const auto groups = load_groups(c);
    make_dir(c.out);
    const auto runs = run_groups(groups, c.pipeline_options());
    const int failures = report_failures(runs);
    const auto report = evaluate_runs(runs, groups, default_windows(c.horizon));
    write_file_atomic((fs::path(c.out) / "report.csv").string(), report_csv(report));
    write_file_atomic((fs::path(c.out) / "report.json").string(), report_json(report).dump(2) + "\n");
    write_manifest(c, "evaluate");
    std::cout << report_table(report);
    return failures == 0 ? 0 : 1;
}

int cmd_report(const Overrides& o) {
    std::string path;
    if (o.input) {
        path = *o.input;
    } else {
        if (o.config.empty()) throw UsageError("report: give --config or --input");
        path = (fs::path(effective_config(o).out) / "report.json").string();
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(path + ": " + e.what());
    }
    const auto report = report_from_json(doc);
    std::cout << report_table(report) << '\n';
    for (const auto& r : rank_methods(report)) {
        std::cout << level_name(r.level) << ' ' << r.window << ':';
        for (auto m : r.order) std::cout << ' ' << method_name(m);
        if (r.tie) std::cout << " (tie)";
        std::cout << '\n';
    }
    return 0;
}

std::string valid_methods() {
    std::string s;
    for (auto m : all_methods()) s += (s.empty() ? "" : ", ") + std::string(method_name(m));
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical forecasting with dynamic middle-out disaggregation"};
    app.require_subcommand(1);
    Overrides o;
    std::uint64_t seed = 0;
    std::string out, methods, input;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", o.config, "Run config JSON (or a manifest.json)");
        if (config_required) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Override the master seed");
        sub->add_option("--out", out, "Override the output directory");
        sub->add_option("--jobs", jobs, "Groups processed concurrently")->check(CLI::PositiveNumber);
        sub->add_option("--methods", methods, "Comma-separated methods: " + valid_methods());
    };
    auto* sim = app.add_subcommand("simulate", "Write synthetic group panels and ground truth");
    auto* fc = app.add_subcommand("forecast", "Write reconciled forecasts for every group and method");
    auto* ev = app.add_subcommand("evaluate", "Score every method and write report.csv / report.json");
    auto* rep = app.add_subcommand("report", "Print the median sMAPE grid and rankings of a saved report");
    add_common(sim, true);
    add_common(fc, true);
    add_common(ev, true);
    add_common(rep, false);
    rep->add_option("--input", input, "report.json to print")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    auto* used = app.get_subcommands().front();
    if (used->count("--seed")) o.seed = seed;
    if (used->count("--out")) o.out = out;
    if (used->count("--jobs")) o.jobs = jobs;
    if (used->count("--methods")) o.methods = methods;
    if (used == rep && used->count("--input")) o.input = input;

    try {
        if (used == sim) return cmd_simulate(o);
        if (used == fc) return cmd_forecast(o);
        if (used == ev) return cmd_evaluate(o);
        return cmd_report(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
