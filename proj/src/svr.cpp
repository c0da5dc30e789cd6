#include "hfc/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hfc {

namespace {
constexpr double kTau = 1e-12;
}

SvrSolution solve_svr(const Matrix& gram, const Vector& targets, const SvrParams& params) {
    const Eigen::Index n = targets.size();
    if (gram.rows() != n || gram.cols() != n) throw InvalidInput("svr: Gram matrix does not match targets");
    if (!(params.cost > 0.0) || !(params.epsilon >= 0.0) || !(params.tolerance > 0.0)) {
        throw InvalidInput("svr: cost and tolerance must be positive, epsilon non-negative");
    }
    const Eigen::Index l = 2 * n;
    const double c = params.cost;
    auto y = [n](Eigen::Index t) { return t < n ? 1.0 : -1.0; };
    auto q = [&](Eigen::Index a, Eigen::Index b) { return y(a) * y(b) * gram(a % n, b % n); };

    std::vector<double> beta(static_cast<std::size_t>(l), 0.0);
    std::vector<double> grad(static_cast<std::size_t>(l));
    for (Eigen::Index t = 0; t < n; ++t) {
        grad[static_cast<std::size_t>(t)] = params.epsilon - targets(t);
        grad[static_cast<std::size_t>(t + n)] = params.epsilon + targets(t);
    }
    auto b = [&](Eigen::Index t) -> double& { return beta[static_cast<std::size_t>(t)]; };
    auto g = [&](Eigen::Index t) -> double& { return grad[static_cast<std::size_t>(t)]; };

    SvrSolution out;
    double gap = 0.0;
    long iter = 0;
    while (true) {
        // Maximal violating index i, then the second-order partner j.
        double gmax = -std::numeric_limits<double>::infinity();
        double gmax2 = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1, j = -1;
        for (Eigen::Index t = 0; t < l; ++t) {
            if (y(t) > 0) {
                if (b(t) < c && -g(t) >= gmax) {
                    gmax = -g(t);
                    i = t;
                }
            } else if (b(t) > 0 && g(t) >= gmax) {
                gmax = g(t);
                i = t;
            }
        }
        double best_obj = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < l; ++t) {
            if (y(t) > 0) {
                if (b(t) > 0) {
                    const double diff = gmax + g(t);
                    gmax2 = std::max(gmax2, g(t));
                    if (i >= 0 && diff > 0) {
                        double quad = gram(i % n, i % n) + gram(t % n, t % n) - 2.0 * y(i) * q(i, t);
                        if (quad <= 0) quad = kTau;
                        const double obj = -diff * diff / quad;
                        if (obj <= best_obj) {
                            best_obj = obj;
                            j = t;
                        }
                    }
                }
            } else if (b(t) < c) {
                const double diff = gmax - g(t);
                gmax2 = std::max(gmax2, -g(t));
                if (i >= 0 && diff > 0) {
                    double quad = gram(i % n, i % n) + gram(t % n, t % n) + 2.0 * y(i) * q(i, t);
                    if (quad <= 0) quad = kTau;
                    const double obj = -diff * diff / quad;
                    if (obj <= best_obj) {
                        best_obj = obj;
                        j = t;
                    }
                }
            }
        }
        gap = gmax + gmax2;
        if (gap < params.tolerance || j < 0) break;
        if (iter >= params.max_iterations) {
            throw ConvergenceError("svr: no convergence after " + std::to_string(iter) +
                                   " iterations, KKT violation " + format_double(gap));
        }
        ++iter;

        const double old_i = b(i), old_j = b(j);
        const double qii = gram(i % n, i % n), qjj = gram(j % n, j % n), qij = q(i, j);
        if (y(i) != y(j)) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0) quad = kTau;
            const double delta = (-g(i) - g(j)) / quad;
            const double diff = b(i) - b(j);
            b(i) += delta;
            b(j) += delta;
            if (diff > 0) {
                if (b(j) < 0) {
                    b(j) = 0;
                    b(i) = diff;
                }
            } else if (b(i) < 0) {
                b(i) = 0;
                b(j) = -diff;
            }
            if (diff > 0) {
                if (b(i) > c) {
                    b(i) = c;
                    b(j) = c - diff;
                }
            } else if (b(j) > c) {
                b(j) = c;
                b(i) = c + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0) quad = kTau;
            const double delta = (g(i) - g(j)) / quad;
            const double sum = b(i) + b(j);
            b(i) -= delta;
            b(j) += delta;
            if (sum > c) {
                if (b(i) > c) {
                    b(i) = c;
                    b(j) = sum - c;
                }
            } else if (b(j) < 0) {
                b(j) = 0;
                b(i) = sum;
            }
            if (sum > c) {
                if (b(j) > c) {
                    b(j) = c;
                    b(i) = sum - c;
                }
            } else if (b(i) < 0) {
                b(i) = 0;
                b(j) = sum;
            }
        }
        const double di = b(i) - old_i, dj = b(j) - old_j;
        for (Eigen::Index t = 0; t < l; ++t) g(t) += q(t, i) * di + q(t, j) * dj;
    }

    // Offset from free variables, else the midpoint of the feasible interval.
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    int free_count = 0;
    for (Eigen::Index t = 0; t < l; ++t) {
        const double yg = y(t) * g(t);
        if (b(t) >= c) {
            if (y(t) < 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
        } else if (b(t) <= 0) {
            if (y(t) > 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    const double rho = free_count > 0 ? free_sum / free_count : (upper + lower) / 2.0;

    out.alpha.assign(beta.begin(), beta.begin() + n);
    out.alpha_star.assign(beta.begin() + n, beta.end());
    out.coef.resize(static_cast<std::size_t>(n));
    for (Eigen::Index t = 0; t < n; ++t) {
        out.coef[static_cast<std::size_t>(t)] = out.alpha[static_cast<std::size_t>(t)] - out.alpha_star[static_cast<std::size_t>(t)];
    }
    out.bias = -rho;
    out.iterations = iter;
    out.gap = gap;
    return out;
}

Matrix SvrModel::predict(const Matrix& x) const {
    Matrix k = cross_kernel(x, support, params.kernel);
    Matrix out(x.rows(), static_cast<Eigen::Index>(coef.size()));
    for (std::size_t j = 0; j < coef.size(); ++j) {
        Eigen::Map<const Vector> a(coef[j].data(), static_cast<Eigen::Index>(coef[j].size()));
        out.col(static_cast<Eigen::Index>(j)) = (k * a).array() + bias[j];
    }
    return out;
}

SvrModel train_svr(const Matrix& x, const Matrix& y, const SvrParams& params) {
    if (x.rows() != y.rows() || x.rows() == 0) throw InvalidInput("svr: feature and target rows differ or are empty");
    SvrModel model;
    model.params = params;
    model.support = x;
    const Matrix gram = kernel_matrix(x, params.kernel);
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        auto sol = solve_svr(gram, y.col(j), params);
        model.coef.push_back(std::move(sol.coef));
        model.bias.push_back(sol.bias);
    }
    return model;
}

}  // namespace hfc
