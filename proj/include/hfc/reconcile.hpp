#pragma once

#include "hfc/base_forecast.hpp"
#include "hfc/hierarchy.hpp"
#include "hfc/panel.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hfc {

enum class Method {
    dhf_gbt,
    dhf_mlp,
    dhf_svr,
    mint_sample,
    wls,
    mint_shrink,
    td_gs1,
    td_gs2,
    tdfp,
    cmo,
    bu,
};

/// Report order: machine-learned disaggregation first, then the static methods.
const std::vector<Method>& all_methods();
/// Upper-case tag used in configs and files ("BU", "MINT_SHRINK", "DHF_GBT", ...).
std::string_view method_name(Method method);
/// Throws InvalidInput listing valid names when `name` is unknown.
Method parse_method(std::string_view name);

/// Linear reconciliation operator, m_k x m, so that reconciled = S * P * base.
struct PMatrix {
    Matrix entries;
    Method tag = Method::bu;
};

enum class ProportionBasis { historical_avg, avg_of_ratios, forecasted };

struct ProportionVector {
    std::vector<double> values;
    ProportionBasis basis = ProportionBasis::historical_avg;
};

/// A parent node and the descendants its value is split across.
struct ProportionGroup {
    std::string parent;
    std::vector<std::string> children;
};

/// The top node and every leaf, the split used by full-hierarchy top-down.
ProportionGroup top_down_group(const Hierarchy& hierarchy);
/// A node and its leaf descendants.
ProportionGroup leaf_group(const Hierarchy& hierarchy, std::size_t node_index);

enum class CovarianceKind { sample, shrinkage, diagonal };

struct CovarianceEstimate {
    Matrix w;
    CovarianceKind estimator = CovarianceKind::sample;
    double shrink_lambda = 0.0;
};

struct ReconciledForecasts {
    Matrix values;            // m x H
    Matrix bottom_estimates;  // m_k x H
    Method tag = Method::bu;
    bool floored = false;     // a negative bottom estimate was clipped to zero
    std::optional<Matrix> variance;
};

PMatrix p_bottom_up(const Matrix& summing);

/// Average of historical proportions, skipping weeks whose parent total is <= 0.
ProportionVector td_proportions_gs1(const SeriesPanel& panel, const ProportionGroup& group);
/// Ratio of average child value to average parent value.
ProportionVector td_proportions_gs2(const SeriesPanel& panel, const ProportionGroup& group);

/**
 * Top-down forecasted proportions at horizon column `h` (0-based): for each
 * leaf, the product over its ancestors of (node forecast / sum of forecasts of
 * the node and its siblings). Renormalized to sum to one.
 */
ProportionVector tdfp_proportions(const BaseForecasts& base, Eigen::Index h, const Hierarchy& hierarchy);

PMatrix p_top_down(const ProportionVector& proportions, Eigen::Index node_count);

/// (S' L S)^-1 S' L with L = W^-1 taken from a diagonal covariance estimate.
PMatrix p_wls(const Matrix& summing, const CovarianceEstimate& diagonal);
/// (S' W^-1 S)^-1 S' W^-1 via Cholesky. Throws SingularMatrix if W is not positive definite.
PMatrix p_mint(const Matrix& summing, const CovarianceEstimate& w, Method tag = Method::mint_sample);

/// Unbiased sample covariance of the residual columns (rows are series).
CovarianceEstimate estimate_w_sample(const Matrix& residuals);
/// Diagonal of the sample covariance.
CovarianceEstimate estimate_w_diagonal(const Matrix& residuals);
/**
 * lambda * diag(sample) + (1 - lambda) * sample. Without `forced_lambda` the
 * intensity is the Schafer-Strimmer estimate on the correlation scale:
 * sum_{i!=j} Var(r_ij) / sum_{i!=j} r_ij^2, clipped to [0, 1].
 */
CovarianceEstimate estimate_w_shrink(const Matrix& residuals, std::optional<double> forced_lambda = std::nullopt);

/// bottom = P * base (per column), negatives floored at zero, values = S * bottom.
ReconciledForecasts reconcile(const PMatrix& p, const Matrix& summing, const Matrix& base);

/// S (S' W^-1 S)^-1 S'.
Matrix reconciled_variance(const Matrix& summing, const Matrix& w);

/// trace(S P W P' S'), the reconciled error variance that MinT minimizes.
double reconciled_trace(const Matrix& summing, const Matrix& p, const Matrix& w);

/// TDFP with a horizon-specific P in every column.
ReconciledForecasts reconcile_tdfp(const BaseForecasts& base, const Hierarchy& hierarchy, const Matrix& summing);

/**
 * Middle-out with historical proportions: level-1 forecasts are summed to the
 * top and split to their leaves with average historical proportions.
 * `middle_forecasts` has one row per level-1 node (node order) and H columns.
 */
ReconciledForecasts conventional_middle_out(const Matrix& middle_forecasts, const SeriesPanel& history,
                                            const Hierarchy& hierarchy);

/// Rebuilds a coherent forecast set from leaf estimates (m_k x H), flooring negatives.
ReconciledForecasts from_bottom(Matrix bottom, const Matrix& summing, Method tag);

/// Max relative residual of values - S * bottom_estimates.
double coherence_error(const ReconciledForecasts& forecasts, const Matrix& summing);

/// CSV with node ids as row and column headers.
std::string p_matrix_csv(const PMatrix& p, const Hierarchy& hierarchy);
/// Long format: node_id,horizon,forecast.
std::string reconciled_csv(const ReconciledForecasts& forecasts, const Hierarchy& hierarchy);

}  // namespace hfc
