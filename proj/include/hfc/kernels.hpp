#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial *_ref twin that
// the tests compare against and the benchmark times.

#include "hfc/common.hpp"

#include <span>
#include <vector>

namespace hfc {

enum class KernelType { linear, polynomial, rbf };

struct KernelSpec {
    KernelType type = KernelType::rbf;
    double gamma = 1.0;
    double coef0 = 0.0;
    int degree = 3;
};

double kernel_value(const KernelSpec& spec, const double* a, const double* b, Eigen::Index dim);

/// Gram matrix K(x_i, x_j) over the rows of `x`.
Matrix kernel_matrix(const Matrix& x, const KernelSpec& spec);
Matrix kernel_matrix_ref(const Matrix& x, const KernelSpec& spec);

/// K(a_i, b_j) for rows of `a` against rows of `b`.
Matrix cross_kernel(const Matrix& a, const Matrix& b, const KernelSpec& spec);

struct SplitCandidate {
    int feature = -1;  // -1: no split improves the objective
    double threshold = 0.0;
    double gain = 0.0;
    Eigen::Index left_count = 0;
};

/**
 * Exact greedy split search for squared loss. `sorted_rows[f]` lists the
 * node's rows ordered by feature `features[f]`. Gain of a split is
 * G_L^2/(n_L+lambda) + G_R^2/(n_R+lambda) - G^2/(n+lambda); thresholds are
 * midpoints between distinct values. Ties resolve to the earlier feature,
 * then the lower threshold.
 */
SplitCandidate best_split(const Matrix& x, std::span<const double> residual,
                          const std::vector<std::vector<int>>& sorted_rows, std::span<const int> features,
                          double lambda, int min_rows);
SplitCandidate best_split_ref(const Matrix& x, std::span<const double> residual,
                              const std::vector<std::vector<int>>& sorted_rows, std::span<const int> features,
                              double lambda, int min_rows);

}  // namespace hfc
