#pragma once

#include "hfc/common.hpp"

#include <cstdint>
#include <vector>

namespace hfc {

struct GbtParams {
    double eta = 0.05;
    int rounds = 100;
    int max_depth = 3;
    double subsample = 1.0;
    double colsample = 1.0;
    double lambda = 1.0;  // L2 penalty on leaf values
    int min_rows = 1;     // per leaf
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

/// Axis-aligned regression tree; node 0 is the root. Goes left when x[feature] < threshold.
struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const Matrix& x, Eigen::Index row) const;
    int depth() const;
};

/**
 * Boosted ensembles on squared loss, one tree sequence per output column.
 * prediction(output j) = base_score[j] + eta * sum of leaf values of trees[j].
 */
struct GbtModel {
    GbtParams params;
    std::vector<double> base_score;
    std::vector<std::vector<RegressionTree>> trees;

    Matrix predict(const Matrix& x) const;
};

/**
 * Greedy residual fitting: each round fits a depth-limited tree to the current
 * residuals on a row subsample (without replacement) and a column subsample,
 * then adds eta times its leaf values. When `rmse_trace` is given it receives
 * the training RMSE over all outputs before the first round and after every round.
 * An output with zero variance gets a constant model and a warning.
 */
GbtModel train_gbt(const Matrix& x, const Matrix& y, const GbtParams& params, std::uint64_t seed,
                   std::vector<double>* rmse_trace = nullptr);

}  // namespace hfc
