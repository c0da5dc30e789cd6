#include "hfc/kernels.hpp"

#include <cmath>

namespace hfc {

namespace {

// Below this many scalar operations the thread fork costs more than it saves.
constexpr Eigen::Index kParallelThreshold = 20000;

SplitCandidate scan_feature(const Matrix& x, std::span<const double> residual, const std::vector<int>& rows,
                            int feature, double lambda, int min_rows) {
    SplitCandidate best;
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n < 2 * min_rows) return best;
    double total = 0.0;
    for (int r : rows) total += residual[static_cast<std::size_t>(r)];
    const double parent_score = total * total / (static_cast<double>(n) + lambda);

    double left = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const int r = rows[static_cast<std::size_t>(i)];
        left += residual[static_cast<std::size_t>(r)];
        const double here = x(r, feature);
        const double next = x(rows[static_cast<std::size_t>(i + 1)], feature);
        if (!(next > here)) continue;
        const Eigen::Index nl = i + 1;
        const Eigen::Index nr = n - nl;
        if (nl < min_rows || nr < min_rows) continue;
        const double right = total - left;
        const double gain = left * left / (static_cast<double>(nl) + lambda) +
                            right * right / (static_cast<double>(nr) + lambda) - parent_score;
        if (gain > best.gain) {
            best.feature = feature;
            best.threshold = 0.5 * (here + next);
            best.gain = gain;
            best.left_count = nl;
        }
    }
    return best;
}

SplitCandidate reduce(const std::vector<SplitCandidate>& per_feature) {
    SplitCandidate best;
    for (const auto& c : per_feature) {
        if (c.feature >= 0 && c.gain > best.gain * (1.0 + 1e-12) + 1e-15) best = c;
    }
    return best;
}

}  // namespace

double kernel_value(const KernelSpec& spec, const double* a, const double* b, Eigen::Index dim) {
    switch (spec.type) {
        case KernelType::linear: {
            double dot = 0.0;
            for (Eigen::Index k = 0; k < dim; ++k) dot += a[k] * b[k];
            return dot;
        }
        case KernelType::polynomial: {
            double dot = 0.0;
            for (Eigen::Index k = 0; k < dim; ++k) dot += a[k] * b[k];
            return std::pow(spec.gamma * dot + spec.coef0, spec.degree);
        }
        case KernelType::rbf: {
            double dist = 0.0;
            for (Eigen::Index k = 0; k < dim; ++k) dist += (a[k] - b[k]) * (a[k] - b[k]);
            return std::exp(-spec.gamma * dist);
        }
    }
    return 0.0;
}

Matrix kernel_matrix_ref(const Matrix& x, const KernelSpec& spec) {
    const auto n = x.rows();
    const auto d = x.cols();
    // Row-major copy so each row's features are contiguous.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = x;
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            k(i, j) = k(j, i) = kernel_value(spec, rows.row(i).data(), rows.row(j).data(), d);
        }
    }
    return k;
}

Matrix kernel_matrix(const Matrix& x, const KernelSpec& spec) {
    const auto n = x.rows();
    const auto d = x.cols();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = x;
    Matrix k(n, n);
#pragma omp parallel for schedule(dynamic, 16) if (n * n * d > kParallelThreshold)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            k(i, j) = k(j, i) = kernel_value(spec, rows.row(i).data(), rows.row(j).data(), d);
        }
    }
    return k;
}

Matrix cross_kernel(const Matrix& a, const Matrix& b, const KernelSpec& spec) {
    if (a.cols() != b.cols()) throw InvalidInput("cross_kernel: feature counts differ");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ra = a, rb = b;
    Matrix k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            k(i, j) = kernel_value(spec, ra.row(i).data(), rb.row(j).data(), a.cols());
        }
    }
    return k;
}

SplitCandidate best_split_ref(const Matrix& x, std::span<const double> residual,
                              const std::vector<std::vector<int>>& sorted_rows, std::span<const int> features,
                              double lambda, int min_rows) {
    std::vector<SplitCandidate> per_feature(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
        per_feature[f] = scan_feature(x, residual, sorted_rows[f], features[f], lambda, min_rows);
    }
    return reduce(per_feature);
}

SplitCandidate best_split(const Matrix& x, std::span<const double> residual,
                          const std::vector<std::vector<int>>& sorted_rows, std::span<const int> features,
                          double lambda, int min_rows) {
    const auto nf = static_cast<Eigen::Index>(features.size());
    const auto work = nf * static_cast<Eigen::Index>(sorted_rows.empty() ? 0 : sorted_rows.front().size());
    std::vector<SplitCandidate> per_feature(features.size());
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
    for (Eigen::Index f = 0; f < nf; ++f) {
        const auto fi = static_cast<std::size_t>(f);
        per_feature[fi] = scan_feature(x, residual, sorted_rows[fi], features[fi], lambda, min_rows);
    }
    return reduce(per_feature);
}

}  // namespace hfc
