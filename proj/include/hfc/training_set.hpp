#pragma once

#include "hfc/panel.hpp"
#include "hfc/reconcile.hpp"

#include <span>
#include <vector>

namespace hfc {

/// Per-feature min-max bounds; constant features map to 0.
struct MinMaxScaler {
    std::vector<double> lower;
    std::vector<double> upper;

    static MinMaxScaler fit(const Matrix& features);
    Matrix transform(const Matrix& features) const;
};

/**
 * Rows are training weeks with a complete lag window and a positive parent
 * total. Features: log(1 + parent sales) at lags 0..L, then log parent price
 * (d = L + 2). Targets: each child's share of the parent.
 */
struct ProportionTrainingSet {
    ProportionGroup group;
    int lags = 0;
    Matrix features;  // n_eff x d
    Matrix targets;   // n_eff x c
    MinMaxScaler scaler;
    std::vector<int> weeks;  // panel week label of each row
};

inline constexpr int kMinTrainingRows = 20;

ProportionTrainingSet build_training_set(const SeriesPanel& panel, const ProportionGroup& group, int lags);

/**
 * Feature rows for the H forecast weeks that follow `history`: lagged values
 * come from history where available and from `parent_forecasts` otherwise;
 * price is the (known) planned price for each forecast week.
 */
Matrix forecast_features(std::span<const double> history, std::span<const double> parent_forecasts,
                         std::span<const double> future_price, int lags);

}  // namespace hfc
