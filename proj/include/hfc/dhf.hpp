#pragma once

#include "hfc/base_forecast.hpp"
#include "hfc/proportion_model.hpp"
#include "hfc/reconcile.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hfc {

enum class GridProfile { paper, compact };

struct DhfOptions {
    int lags = 3;
    int folds = 3;
    GridProfile grid = GridProfile::paper;
    SearchMode search = SearchMode::greedy;
    /// Overrides `grid` when set.
    std::optional<HyperGrid> custom_grid;

    HyperGrid grid_for(ModelFamily family) const;
};

struct DhfResult {
    ReconciledForecasts forecasts;
    std::vector<ProportionModel> models;  // one per level-1 node, node order
};

Method dhf_method(ModelFamily family);

/**
 * Dynamic middle-out forecast.
 *
 * Level-1 base forecasts are summed to the top; each level-1 node's leaves
 * receive that node's forecast times proportions predicted by a model trained
 * on the node's history (first `train_weeks` columns of `panel`). Prediction
 * features use the node's own forecasts for future lags and the panel's
 * planned prices for the forecast weeks. Each group's model draws its seed
 * from `seed` and the group id, so results do not depend on evaluation order.
 */
DhfResult dhf_forecast(const SeriesPanel& panel, const Hierarchy& hierarchy, Eigen::Index train_weeks,
                       const BaseForecasts& base, ModelFamily family, const DhfOptions& options, std::uint64_t seed);

/// Convenience overload that fits the base forecasts itself.
DhfResult dhf_forecast(const SeriesPanel& panel, const Hierarchy& hierarchy, Eigen::Index train_weeks, int horizon,
                       ModelFamily family, const DhfOptions& options, std::uint64_t seed);

}  // namespace hfc
