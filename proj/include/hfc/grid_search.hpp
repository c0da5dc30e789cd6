#pragma once

#include "hfc/common.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hfc {

using ParamMap = std::map<std::string, double>;

struct HyperParameter {
    std::string name;
    std::vector<double> candidates;
    std::size_t initial = 0;  // starting candidate for the greedy sweep
};

/// Ordered list of tuned parameters; the greedy sweep visits them in this order.
struct HyperGrid {
    std::vector<HyperParameter> parameters;

    ParamMap initial() const;
    std::size_t cell_count() const;
};

enum class SearchMode { greedy, exhaustive };

/// Fits on (train_x, train_y) with `params` and returns raw predictions for valid_x.
using Trainer = std::function<Matrix(const Matrix& train_x, const Matrix& train_y, const Matrix& valid_x,
                                     const ParamMap& params, std::uint64_t seed)>;

struct SearchResult {
    ParamMap best;
    double validation_rmse = 0.0;
    std::vector<std::pair<ParamMap, double>> visited;  // in evaluation order
};

/// Expanding-window splits of n time-ordered rows into `folds` (train_end, valid_end) pairs.
std::vector<std::pair<Eigen::Index, Eigen::Index>> time_folds(Eigen::Index rows, int folds);

/**
 * Hyperparameter search scored by mean validation RMSE over time-ordered
 * folds (earlier rows train, the next block validates).
 *
 * greedy: one coordinate-wise sweep; each parameter in grid order is set to
 * its best candidate with the others held at their current values.
 * exhaustive: every cell of the Cartesian product.
 * Ties keep the earlier candidate. A failing cell is skipped with a warning;
 * if every cell fails the last error is rethrown.
 */
SearchResult grid_search(const Trainer& trainer, const Matrix& x, const Matrix& y, const HyperGrid& grid,
                         int folds, std::uint64_t seed, SearchMode mode = SearchMode::greedy);

}  // namespace hfc
