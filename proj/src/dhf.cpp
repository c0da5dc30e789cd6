#include "hfc/dhf.hpp"

namespace hfc {

HyperGrid DhfOptions::grid_for(ModelFamily family) const {
    if (custom_grid) return *custom_grid;
    return grid == GridProfile::paper ? paper_grid(family) : compact_grid(family);
}

Method dhf_method(ModelFamily family) {
    switch (family) {
        case ModelFamily::gbt: return Method::dhf_gbt;
        case ModelFamily::mlp: return Method::dhf_mlp;
        case ModelFamily::svr: return Method::dhf_svr;
    }
    return Method::dhf_gbt;
}

DhfResult dhf_forecast(const SeriesPanel& panel, const Hierarchy& hierarchy, Eigen::Index train_weeks,
                       const BaseForecasts& base, ModelFamily family, const DhfOptions& options, std::uint64_t seed) {
    if (hierarchy.level_count() < 3) throw InvalidInput("dhf: hierarchy needs a middle level between top and bottom");
    const auto horizon = base.values.cols();
    if (train_weeks + horizon > panel.week_count()) throw InvalidInput("dhf: panel does not cover the forecast weeks");
    const Matrix summing = summing_matrix(hierarchy);
    const SeriesPanel history = panel.slice(0, train_weeks);
    const auto& middle = hierarchy.level_nodes(1);

    DhfResult result;
    Matrix bottom = Matrix::Zero(summing.cols(), horizon);
    for (auto node : middle) {
        const auto group = leaf_group(hierarchy, node);
        try {
            const auto set = build_training_set(history, group, options.lags);
            const auto group_seed = derive_seed(seed, std::string(family_name(family)) + "/" + group.parent);
            auto model = fit_proportion_model(set, family, {options.grid_for(family), options.folds, options.search},
                                              group_seed);

            const auto row = static_cast<Eigen::Index>(node);
            std::vector<double> past(static_cast<std::size_t>(train_weeks)), fc(static_cast<std::size_t>(horizon)),
                price(static_cast<std::size_t>(horizon));
            for (Eigen::Index t = 0; t < train_weeks; ++t) past[static_cast<std::size_t>(t)] = panel.sales(row, t);
            for (Eigen::Index h = 0; h < horizon; ++h) {
                fc[static_cast<std::size_t>(h)] = base.values(row, h);
                price[static_cast<std::size_t>(h)] = panel.price(row, train_weeks + h);
            }
            const Matrix props = predict_proportions(model, forecast_features(past, fc, price, options.lags));

            const auto leaves = hierarchy.leaves_under(node);
            for (std::size_t j = 0; j < leaves.size(); ++j) {
                const auto b = static_cast<Eigen::Index>(hierarchy.bottom_position(leaves[j]));
                for (Eigen::Index h = 0; h < horizon; ++h) {
                    bottom(b, h) = base.values(row, h) * props(h, static_cast<Eigen::Index>(j));
                }
            }
            result.models.push_back(std::move(model));
        } catch (const std::exception& e) {
            throw Error("dhf group '" + group.parent + "': " + e.what());
        }
    }
    result.forecasts = from_bottom(std::move(bottom), summing, dhf_method(family));
    return result;
}

DhfResult dhf_forecast(const SeriesPanel& panel, const Hierarchy& hierarchy, Eigen::Index train_weeks, int horizon,
                       ModelFamily family, const DhfOptions& options, std::uint64_t seed) {
    const auto base = forecast_all_nodes(panel, train_weeks, horizon);
    return dhf_forecast(panel, hierarchy, train_weeks, base, family, options, seed);
}

}  // namespace hfc
