#pragma once

#include "hfc/hierarchy.hpp"
#include "hfc/reconcile.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hfc {

/// Symmetric MAPE in percent: (2/n) sum |y - f| / |y + f| * 100, with 0/0 terms counted as 0.
double smape(std::span<const double> actual, std::span<const double> forecast);

enum class Level { top, middle, bottom };
std::string_view level_name(Level level);

/// First `length` horizons, scored jointly (sMAPE with n = length).
struct Window {
    std::string name;
    int length = 1;
};

/// h1, h1-4 and h1-8, truncated to windows that fit in `horizon`.
std::vector<Window> default_windows(int horizon);

struct RawScore {
    std::string group;
    std::string node;
    double smape = 0.0;
};

struct EvalCell {
    Method method = Method::bu;
    Level level = Level::top;
    std::string window;
    double median = 0.0;
    std::vector<RawScore> scores;
};

/// Median sMAPE per (method, level, window), pooled over groups and nodes.
struct EvalReport {
    std::vector<std::string> windows;
    std::vector<EvalCell> cells;

    std::optional<double> median(Method method, Level level, const std::string& window) const;
    std::vector<Method> methods() const;
};

/// Forecasts of every method for one group plus the held-out actuals.
struct GroupEvaluation {
    std::string group_id;
    const Hierarchy* hierarchy = nullptr;
    Matrix actual;  // m x H
    std::map<Method, ReconciledForecasts> forecasts;
};

double median_of(std::vector<double> values);

/// Throws InvalidInput when a forecast or actual block is shorter than the longest window.
EvalReport evaluate(const std::vector<GroupEvaluation>& groups, const std::vector<Window>& windows);

struct Ranking {
    Level level = Level::top;
    std::string window;
    std::vector<Method> order;  // ascending median sMAPE, ties alphabetical
    bool tie = false;
};

std::vector<Ranking> rank_methods(const EvalReport& report);

/// Long format: method,level,window,median_smape.
std::string report_csv(const EvalReport& report);
nlohmann::json report_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);
/// Methods x (window, level) grid of medians.
std::string report_table(const EvalReport& report);

}  // namespace hfc
