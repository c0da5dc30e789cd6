#pragma once

#include "hfc/kernels.hpp"

#include <cstdint>
#include <vector>

namespace hfc {

struct SvrParams {
    KernelSpec kernel;
    double cost = 1.0;
    double epsilon = 0.01;
    double tolerance = 1e-3;  // KKT violation bound on the maximal violating pair
    long max_iterations = 1'000'000;
};

/// Solution of one epsilon-SVR dual: f(x) = sum_i coef_i K(x_i, x) + bias.
struct SvrSolution {
    std::vector<double> alpha;       // upper-tube multipliers
    std::vector<double> alpha_star;  // lower-tube multipliers
    std::vector<double> coef;        // alpha - alpha_star
    double bias = 0.0;
    long iterations = 0;
    double gap = 0.0;  // final maximal KKT violation
};

/**
 * Sequential minimal optimization (second-order working-set selection) over
 * the 2n-variable dual with the single equality constraint sum(alpha - alpha*) = 0
 * and box 0 <= alpha, alpha* <= C. Throws ConvergenceError with the remaining
 * violation when `max_iterations` is exhausted.
 */
SvrSolution solve_svr(const Matrix& gram, const Vector& targets, const SvrParams& params);

/// One independent epsilon-SVR per output column sharing the training rows and kernel.
struct SvrModel {
    SvrParams params;
    Matrix support;                   // training rows (n x d)
    std::vector<std::vector<double>> coef;  // per output, length n
    std::vector<double> bias;

    Matrix predict(const Matrix& x) const;
};

SvrModel train_svr(const Matrix& x, const Matrix& y, const SvrParams& params);

}  // namespace hfc
