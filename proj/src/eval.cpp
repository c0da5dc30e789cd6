#include "hfc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace hfc {

double smape(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.empty()) throw InvalidInput("smape: empty series");
    if (actual.size() != forecast.size()) throw InvalidInput("smape: lengths differ");
    double sum = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double den = std::abs(actual[t] + forecast[t]);
        if (den == 0.0) continue;
        sum += std::abs(actual[t] - forecast[t]) / den;
    }
    return 2.0 / static_cast<double>(actual.size()) * sum * 100.0;
}

std::string_view level_name(Level level) {
    switch (level) {
        case Level::top: return "top";
        case Level::middle: return "middle";
        case Level::bottom: return "bottom";
    }
    return "?";
}

namespace {
Level parse_level(const std::string& s) {
    if (s == "top") return Level::top;
    if (s == "middle") return Level::middle;
    if (s == "bottom") return Level::bottom;
    throw InvalidInput("unknown level '" + s + "'");
}

constexpr Level kLevels[] = {Level::top, Level::middle, Level::bottom};
}  // namespace

std::vector<Window> default_windows(int horizon) {
    std::vector<Window> out;
    for (int len : {1, 4, 8}) {
        if (len > horizon) break;
        out.push_back({len == 1 ? "h1" : "h1-" + std::to_string(len), len});
    }
    return out;
}

std::optional<double> EvalReport::median(Method method, Level level, const std::string& window) const {
    for (const auto& c : cells) {
        if (c.method == method && c.level == level && c.window == window) return c.median;
    }
    return std::nullopt;
}

std::vector<Method> EvalReport::methods() const {
    std::vector<Method> out;
    for (const auto& c : cells) {
        if (std::find(out.begin(), out.end(), c.method) == out.end()) out.push_back(c.method);
    }
    return out;
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw InvalidInput("median of empty set");
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

EvalReport evaluate(const std::vector<GroupEvaluation>& groups, const std::vector<Window>& windows) {
    if (windows.empty()) throw InvalidInput("evaluate: no windows");
    int longest = 0;
    for (const auto& w : windows) longest = std::max(longest, w.length);

    EvalReport report;
    for (const auto& w : windows) report.windows.push_back(w.name);

    std::map<Method, std::map<std::pair<int, std::size_t>, std::vector<RawScore>>> pooled;
    for (const auto& g : groups) {
        if (!g.hierarchy) throw InvalidInput("evaluate: group '" + g.group_id + "' has no hierarchy");
        const auto& h = *g.hierarchy;
        if (g.actual.cols() < longest || g.actual.rows() != static_cast<Eigen::Index>(h.size())) {
            throw InvalidInput("evaluate: group '" + g.group_id + "' actuals do not cover " + std::to_string(longest) +
                               " horizons for every node");
        }
        for (const auto& [method, fc] : g.forecasts) {
            if (fc.values.cols() < longest || fc.values.rows() != g.actual.rows()) {
                throw InvalidInput("evaluate: horizon mismatch for " + std::string(method_name(method)) + " in group '" +
                                   g.group_id + "'");
            }
            for (int li = 0; li < 3; ++li) {
                const Level level = kLevels[li];
                int depth = level == Level::top ? 0 : level == Level::middle ? 1 : h.bottom_level();
                if (level == Level::middle && h.level_count() < 3) continue;
                for (auto node : h.level_nodes(depth)) {
                    const auto row = static_cast<Eigen::Index>(node);
                    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
                        const auto len = static_cast<std::size_t>(windows[wi].length);
                        std::vector<double> a(len), f(len);
                        for (std::size_t t = 0; t < len; ++t) {
                            a[t] = g.actual(row, static_cast<Eigen::Index>(t));
                            f[t] = fc.values(row, static_cast<Eigen::Index>(t));
                        }
                        pooled[method][{li, wi}].push_back({g.group_id, h.node(node).id, smape(a, f)});
                    }
                }
            }
        }
    }
    for (Method method : all_methods()) {
        auto it = pooled.find(method);
        if (it == pooled.end()) continue;
        for (int li = 0; li < 3; ++li) {
            for (std::size_t wi = 0; wi < windows.size(); ++wi) {
                auto sc = it->second.find({li, wi});
                if (sc == it->second.end()) continue;
                std::vector<double> values;
                for (const auto& s : sc->second) values.push_back(s.smape);
                report.cells.push_back({method, kLevels[li], windows[wi].name, median_of(values), sc->second});
            }
        }
    }
    return report;
}

std::vector<Ranking> rank_methods(const EvalReport& report) {
    std::vector<Ranking> out;
    for (Level level : kLevels) {
        for (const auto& window : report.windows) {
            std::vector<std::pair<double, Method>> entries;
            for (const auto& c : report.cells) {
                if (c.level == level && c.window == window) entries.emplace_back(c.median, c.method);
            }
            if (entries.empty()) continue;
            std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return method_name(a.second) < method_name(b.second);
            });
            Ranking r{level, window, {}, false};
            for (std::size_t i = 0; i < entries.size(); ++i) {
                r.order.push_back(entries[i].second);
                if (i > 0 && entries[i].first == entries[i - 1].first) r.tie = true;
            }
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::string report_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "method,level,window,median_smape\n";
    for (const auto& c : report.cells) {
        out << method_name(c.method) << ',' << level_name(c.level) << ',' << c.window << ','
            << format_fixed(c.median, 6) << '\n';
    }
    return out.str();
}

nlohmann::json report_json(const EvalReport& report) {
    nlohmann::json doc;
    doc["windows"] = report.windows;
    auto cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
        auto scores = nlohmann::json::array();
        for (const auto& s : c.scores) scores.push_back({{"group", s.group}, {"node", s.node}, {"smape", s.smape}});
        cells.push_back({{"method", std::string(method_name(c.method))},
                         {"level", std::string(level_name(c.level))},
                         {"window", c.window},
                         {"median_smape", c.median},
                         {"scores", std::move(scores)}});
    }
    doc["cells"] = std::move(cells);
    auto ranks = nlohmann::json::array();
    for (const auto& r : rank_methods(report)) {
        std::vector<std::string> names;
        for (auto m : r.order) names.emplace_back(method_name(m));
        ranks.push_back({{"level", std::string(level_name(r.level))}, {"window", r.window}, {"order", names},
                         {"tie", r.tie}});
    }
    doc["rankings"] = std::move(ranks);
    return doc;
}

EvalReport report_from_json(const nlohmann::json& doc) {
    try {
        EvalReport report;
        report.windows = doc.at("windows").get<std::vector<std::string>>();
        for (const auto& c : doc.at("cells")) {
            EvalCell cell;
            cell.method = parse_method(c.at("method").get<std::string>());
            cell.level = parse_level(c.at("level").get<std::string>());
            cell.window = c.at("window").get<std::string>();
            cell.median = c.at("median_smape").get<double>();
            for (const auto& s : c.at("scores")) {
                cell.scores.push_back({s.at("group").get<std::string>(), s.at("node").get<std::string>(),
                                       s.at("smape").get<double>()});
            }
            report.cells.push_back(std::move(cell));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("report json: ") + e.what());
    }
}

std::string report_table(const EvalReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(12) << "method";
    for (const auto& w : report.windows) {
        for (Level level : kLevels) out << std::right << std::setw(13) << (w + ":" + std::string(level_name(level)));
    }
    out << '\n';
    for (Method m : report.methods()) {
        out << std::left << std::setw(12) << method_name(m);
        for (const auto& w : report.windows) {
            for (Level level : kLevels) {
                auto v = report.median(m, level, w);
                out << std::right << std::setw(13) << (v ? format_fixed(*v, 2) : std::string("-"));
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace hfc
