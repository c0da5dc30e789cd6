#include "hfc/training_set.hpp"

#include <algorithm>
#include <cmath>

namespace hfc {

MinMaxScaler MinMaxScaler::fit(const Matrix& features) {
    MinMaxScaler s;
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        s.lower.push_back(features.rows() ? features.col(j).minCoeff() : 0.0);
        s.upper.push_back(features.rows() ? features.col(j).maxCoeff() : 0.0);
    }
    return s;
}

Matrix MinMaxScaler::transform(const Matrix& features) const {
    if (static_cast<std::size_t>(features.cols()) != lower.size()) {
        throw InvalidInput("scaler: expected " + std::to_string(lower.size()) + " features");
    }
    Matrix out(features.rows(), features.cols());
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        const auto k = static_cast<std::size_t>(j);
        const double range = upper[k] - lower[k];
        if (range > 0.0) {
            out.col(j) = (features.col(j).array() - lower[k]) / range;
        } else {
            out.col(j).setZero();
        }
    }
    return out;
}

ProportionTrainingSet build_training_set(const SeriesPanel& panel, const ProportionGroup& group, int lags) {
    if (lags < 0) throw InvalidInput("training set: lag count must be >= 0");
    auto row_of = [&](const std::string& id) {
        auto it = std::find(panel.node_ids.begin(), panel.node_ids.end(), id);
        if (it == panel.node_ids.end()) throw InvalidInput("training set: node '" + id + "' not in panel");
        return static_cast<Eigen::Index>(it - panel.node_ids.begin());
    };
    const auto parent = row_of(group.parent);
    std::vector<Eigen::Index> children;
    for (const auto& c : group.children) children.push_back(row_of(c));
    if (children.empty()) throw InvalidInput("training set: group '" + group.parent + "' has no children");

    const auto n = panel.week_count();
    const int d = lags + 2;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index t = lags; t < n; ++t) {
        if (panel.sales(parent, t) > 0.0) kept.push_back(t);
    }
    if (static_cast<int>(kept.size()) < kMinTrainingRows) {
        throw InvalidInput("training set for '" + group.parent + "': " + std::to_string(kept.size()) +
                           " usable rows, need at least " + std::to_string(kMinTrainingRows));
    }

    ProportionTrainingSet set;
    set.group = group;
    set.lags = lags;
    set.features.resize(static_cast<Eigen::Index>(kept.size()), d);
    set.targets.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(children.size()));
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const auto t = kept[r];
        const auto row = static_cast<Eigen::Index>(r);
        for (int l = 0; l <= lags; ++l) set.features(row, l) = std::log1p(panel.sales(parent, t - l));
        set.features(row, d - 1) = std::log(panel.price(parent, t));
        const double total = panel.sales(parent, t);
        double sum = 0.0;
        for (std::size_t j = 0; j < children.size(); ++j) {
            const double share = panel.sales(children[j], t) / total;
            set.targets(row, static_cast<Eigen::Index>(j)) = share;
            sum += share;
        }
        // Coherent panels give sum == 1 up to rounding; remove the rounding.
        set.targets.row(row) /= sum;
        set.weeks.push_back(panel.weeks[static_cast<std::size_t>(t)]);
    }
    set.scaler = MinMaxScaler::fit(set.features);
    return set;
}

Matrix forecast_features(std::span<const double> history, std::span<const double> parent_forecasts,
                         std::span<const double> future_price, int lags) {
    if (parent_forecasts.size() != future_price.size()) {
        throw InvalidInput("forecast features: forecast and price horizons differ");
    }
    const auto n = static_cast<std::ptrdiff_t>(history.size());
    const auto horizon = static_cast<Eigen::Index>(parent_forecasts.size());
    if (n < lags) throw InvalidInput("forecast features: history shorter than lag count");
    auto value_at = [&](std::ptrdiff_t index) {
        return index < n ? history[static_cast<std::size_t>(index)]
                         : parent_forecasts[static_cast<std::size_t>(index - n)];
    };
    Matrix out(horizon, lags + 2);
    for (Eigen::Index h = 0; h < horizon; ++h) {
        const auto week = n + h;
        for (int l = 0; l <= lags; ++l) out(h, l) = std::log1p(std::max(0.0, value_at(week - l)));
        const double price = future_price[static_cast<std::size_t>(h)];
        if (!(price > 0.0)) throw InvalidInput("forecast features: price must be positive");
        out(h, lags + 1) = std::log(price);
    }
    return out;
}

}  // namespace hfc
