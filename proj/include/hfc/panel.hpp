#pragma once

#include "hfc/hierarchy.hpp"

#include <string>
#include <vector>

namespace hfc {

/**
 * Aligned weekly observations for every node of a hierarchy.
 *
 * Rows follow the hierarchy's node order; columns are weeks 1..n.
 * Aggregate sales equal the sum of their children's sales; aggregate prices
 * are sales-weighted averages of their children's prices.
 */
struct SeriesPanel {
    std::vector<std::string> node_ids;
    std::vector<int> weeks;
    Matrix sales;  // m x n, non-negative
    Matrix price;  // m x n, positive

    Eigen::Index node_count() const { return sales.rows(); }
    Eigen::Index week_count() const { return sales.cols(); }

    /// Columns [first, first + count).
    SeriesPanel slice(Eigen::Index first, Eigen::Index count) const;
};

/**
 * Builds a coherent panel from bottom-level sales and prices (m_k x n).
 * Aggregate prices are sales-weighted averages of the children; a week with
 * zero total child sales falls back to the unweighted mean.
 */
SeriesPanel panel_from_bottom(const Hierarchy& hierarchy, const Matrix& bottom_sales, const Matrix& bottom_price,
                              std::vector<int> weeks = {});

/// Sales-weighted aggregate prices for every non-leaf row, filled in place.
void aggregate_prices(const Hierarchy& hierarchy, const Matrix& sales, Matrix& price);

/// Largest relative coherence residual |sales_i - sum children| / max(1, |sales_i|).
double coherence_residual(const Hierarchy& hierarchy, const Matrix& values);

/// Loads a `week,node_id,sales,price` CSV; rows in any order. Requires a
/// complete week x node grid, non-negative sales, positive prices and
/// coherent aggregates (1e-9 relative).
SeriesPanel read_panel_csv(const std::string& path, const Hierarchy& hierarchy);
void write_panel_csv(const std::string& path, const SeriesPanel& panel);

}  // namespace hfc
