#include "hfc/gbt.hpp"

#include "hfc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hfc {

double RegressionTree::predict(const Matrix& x, Eigen::Index row) const {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(at)];
        at = x(row, n.feature) < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(at)].value;
}

int RegressionTree::depth() const {
    std::vector<int> depth(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, depth[i]);
        if (nodes[i].feature >= 0) {
            depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
        }
    }
    return deepest;
}

Matrix GbtModel::predict(const Matrix& x) const {
    Matrix out(x.rows(), static_cast<Eigen::Index>(base_score.size()));
    for (std::size_t j = 0; j < base_score.size(); ++j) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            double sum = 0.0;
            for (const auto& tree : trees[j]) sum += tree.predict(x, r);
            out(r, static_cast<Eigen::Index>(j)) = base_score[j] + params.eta * sum;
        }
    }
    return out;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const std::vector<double>& residual, const GbtParams& params,
                std::vector<int> features)
        : x_(x), residual_(residual), params_(params), features_(std::move(features)) {}

    RegressionTree build(const std::vector<int>& rows) {
        std::vector<std::vector<int>> sorted;
        for (int f : features_) {
            auto order = rows;
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x_(a, f) < x_(b, f); });
            sorted.push_back(std::move(order));
        }
        tree_.nodes.clear();
        grow(std::move(sorted), 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::vector<int>> sorted, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const auto& rows = sorted.front();

        SplitCandidate split;
        if (depth < params_.max_depth && static_cast<int>(rows.size()) >= 2 * params_.min_rows) {
            split = best_split(x_, residual_, sorted, features_, params_.lambda, params_.min_rows);
        }
        if (split.feature < 0) {
            double g = 0.0;
            for (int r : rows) g += residual_[static_cast<std::size_t>(r)];
            tree_.nodes[static_cast<std::size_t>(id)].value = g / (static_cast<double>(rows.size()) + params_.lambda);
            return id;
        }

        std::vector<std::vector<int>> left(sorted.size()), right(sorted.size());
        for (std::size_t f = 0; f < sorted.size(); ++f) {
            for (int r : sorted[f]) (x_(r, split.feature) < split.threshold ? left[f] : right[f]).push_back(r);
        }
        sorted.clear();
        tree_.nodes[static_cast<std::size_t>(id)].feature = split.feature;
        tree_.nodes[static_cast<std::size_t>(id)].threshold = split.threshold;
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        tree_.nodes[static_cast<std::size_t>(id)].left = l;
        tree_.nodes[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    const Matrix& x_;
    const std::vector<double>& residual_;
    const GbtParams& params_;
    std::vector<int> features_;
    RegressionTree tree_;
};

double rmse(const Matrix& y, const Matrix& pred) {
    return std::sqrt((y - pred).squaredNorm() / static_cast<double>(y.size()));
}

}  // namespace

GbtModel train_gbt(const Matrix& x, const Matrix& y, const GbtParams& params, std::uint64_t seed,
                   std::vector<double>* rmse_trace) {
    if (x.rows() != y.rows() || x.rows() == 0) throw InvalidInput("gbt: feature and target rows differ or are empty");
    if (!(params.eta > 0.0 && params.eta <= 1.0)) throw InvalidInput("gbt: eta must be in (0, 1]");
    if (!(params.subsample > 0.0 && params.subsample <= 1.0) || !(params.colsample > 0.0 && params.colsample <= 1.0)) {
        throw InvalidInput("gbt: subsample and colsample must be in (0, 1]");
    }
    if (params.rounds < 0 || params.max_depth < 0 || params.min_rows < 1 || params.lambda < 0.0) {
        throw InvalidInput("gbt: invalid rounds, depth, min_rows or lambda");
    }
    const auto n = static_cast<int>(x.rows());
    const auto d = static_cast<int>(x.cols());
    const auto outputs = y.cols();

    GbtModel model;
    model.params = params;
    model.trees.resize(static_cast<std::size_t>(outputs));
    Matrix pred(y.rows(), outputs);
    std::vector<bool> constant(static_cast<std::size_t>(outputs), false);
    for (Eigen::Index j = 0; j < outputs; ++j) {
        const double mean = y.col(j).mean();
        model.base_score.push_back(mean);
        pred.col(j).setConstant(mean);
        if ((y.col(j).array() == y(0, j)).all()) {
            constant[static_cast<std::size_t>(j)] = true;
            warn("gbt: output " + std::to_string(j) + " has zero variance; using a constant model");
        }
    }
    if (rmse_trace) {
        rmse_trace->clear();
        rmse_trace->push_back(rmse(y, pred));
    }

    std::mt19937_64 rng(seed);
    std::vector<int> all_rows(static_cast<std::size_t>(n)), all_features(static_cast<std::size_t>(d));
    std::iota(all_rows.begin(), all_rows.end(), 0);
    std::iota(all_features.begin(), all_features.end(), 0);
    const int row_take = std::max(1, static_cast<int>(std::floor(params.subsample * n)));
    const int col_take = std::max(1, static_cast<int>(std::ceil(params.colsample * d - 1e-9)));

    std::vector<double> residual(static_cast<std::size_t>(n));
    for (int round = 0; round < params.rounds; ++round) {
        auto rows = all_rows;
        if (row_take < n) {
            std::shuffle(rows.begin(), rows.end(), rng);
            rows.resize(static_cast<std::size_t>(row_take));
            std::sort(rows.begin(), rows.end());
        }
        auto features = all_features;
        if (col_take < d) {
            std::shuffle(features.begin(), features.end(), rng);
            features.resize(static_cast<std::size_t>(col_take));
            std::sort(features.begin(), features.end());
        }
        for (Eigen::Index j = 0; j < outputs; ++j) {
            if (constant[static_cast<std::size_t>(j)]) continue;
            for (int r = 0; r < n; ++r) residual[static_cast<std::size_t>(r)] = y(r, j) - pred(r, j);
            TreeBuilder builder(x, residual, params, features);
            RegressionTree tree = builder.build(rows);
            for (int r = 0; r < n; ++r) pred(r, j) += params.eta * tree.predict(x, r);
            model.trees[static_cast<std::size_t>(j)].push_back(std::move(tree));
        }
        if (rmse_trace) rmse_trace->push_back(rmse(y, pred));
    }
    return model;
}

}  // namespace hfc
