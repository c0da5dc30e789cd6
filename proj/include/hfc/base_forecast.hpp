#pragma once

#include "hfc/panel.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace hfc {

/**
 * ARX(p) on log(1 + sales) with log(price) as exogenous regressor:
 *
 *   y_t = intercept + sum_i ar_coeffs[i] * y_{t-1-i} + price_coeff * log(price_t) + e_t
 *
 * fitted by ordinary least squares conditional on the first p observations.
 * When log price is constant over the fitting window it is aliased with the
 * intercept; the column is dropped and `uses_price` is false.
 */
struct ArxModel {
    int order = 0;
    double intercept = 0.0;
    std::vector<double> ar_coeffs;
    double price_coeff = 0.0;
    bool uses_price = false;
    double residual_variance = 0.0;
    std::vector<double> train_residuals;  // one-step, log scale, length n - p
    std::vector<double> train_fitted;     // one-step fitted log values aligned with train_residuals
};

/// Thrown when the ARX design matrix is rank deficient; names the offending column.
class SingularDesign : public SingularMatrix {
public:
    SingularDesign(std::string column, const std::string& message)
        : SingularMatrix(message), column_(std::move(column)) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

inline double log_transform(double sales) { return std::log1p(sales); }
inline double inverse_log_transform(double value) { return std::expm1(value); }

ArxModel fit_arx(std::span<const double> sales, std::span<const double> price, int order);

/// Picks the order minimizing AIC = n_eff ln(SSE / n_eff) + 2 (p + 2) over
/// `order_grid`. Every candidate is scored on the same window (observations
/// after the largest candidate order) so the criteria are comparable. Ties go
/// to the smaller order; singular candidates are skipped.
int select_order(std::span<const double> sales, std::span<const double> price, std::span<const int> order_grid);

/// Recursive multi-step forecasts, back-transformed and floored at zero.
std::vector<double> forecast_arx(const ArxModel& model, std::span<const double> history,
                                 std::span<const double> future_price);

std::vector<double> naive_forecast(std::span<const double> sales, int horizon);

/**
 * Independent base forecasts for every node of a panel.
 *
 * values: m x H on the sales scale. residuals: m x n_r one-step in-sample
 * errors on the sales scale (actual - expm1(fitted)), aligned on the last n_r
 * training weeks common to every node's model.
 */
struct BaseForecasts {
    std::vector<std::string> node_ids;
    Matrix values;
    Matrix residuals;
    std::vector<ArxModel> models;
};

struct BaseForecastOptions {
    std::vector<int> order_grid{0, 1, 2, 3};
};

/**
 * Fits one ARX model per node on the first `train_weeks` columns and forecasts
 * `horizon` steps using the panel's future prices (weeks train_weeks..).
 * Nodes are fitted in parallel; results do not depend on thread count.
 */
BaseForecasts forecast_all_nodes(const SeriesPanel& panel, Eigen::Index train_weeks, int horizon,
                                 const BaseForecastOptions& options = {});

}  // namespace hfc
