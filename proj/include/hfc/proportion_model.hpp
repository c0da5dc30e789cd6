#pragma once

#include "hfc/gbt.hpp"
#include "hfc/grid_search.hpp"
#include "hfc/mlp.hpp"
#include "hfc/svr.hpp"
#include "hfc/training_set.hpp"

#include "json.hpp"

#include <cstdint>
#include <string_view>
#include <variant>

namespace hfc {

enum class ModelFamily { gbt, mlp, svr };

std::string_view family_name(ModelFamily family);
ModelFamily parse_family(std::string_view name);

/// Candidate values quoted for each family (learning rate 0.01..0.05, subsamples
/// 0.3..1, 100..500 rounds, depth 2..10; hidden 1..41, decay 0..0.3; gamma 0.1..1, C 1..100).
HyperGrid paper_grid(ModelFamily family);
/// A reduced grid for desk-scale benchmark runs.
HyperGrid compact_grid(ModelFamily family);

GbtParams gbt_params(const ParamMap& params);
MlpParams mlp_params(const ParamMap& params);
SvrParams svr_params(const ParamMap& params);

/// Trainer for grid_search; features are passed exactly as the model will see them.
Trainer make_trainer(ModelFamily family);

/// A trained children-proportion regressor for one parent group.
struct ProportionModel {
    ModelFamily family = ModelFamily::gbt;
    ProportionGroup group;
    int lags = 0;
    MinMaxScaler scaler;
    ParamMap hyperparameters;
    double validation_rmse = 0.0;
    std::variant<GbtModel, MlpModel, SvrModel> model;

    /// MLP and SVR read min-max scaled features; GBT reads the log features directly.
    bool scaled_inputs() const { return family != ModelFamily::gbt; }
    /// Raw per-child outputs for unscaled feature rows.
    Matrix predict_raw(const Matrix& features) const;
};

struct ProportionFitOptions {
    HyperGrid grid;
    int folds = 3;
    SearchMode mode = SearchMode::greedy;
};

/// Grid search over `options.grid`, then a final fit on the whole training set.
ProportionModel fit_proportion_model(const ProportionTrainingSet& set, ModelFamily family,
                                     const ProportionFitOptions& options, std::uint64_t seed);

GbtModel fit_gbt(const ProportionTrainingSet& set, const HyperGrid& grid, std::uint64_t seed, int folds = 3);
MlpModel fit_mlp(const ProportionTrainingSet& set, const HyperGrid& grid, std::uint64_t seed, int folds = 3);
SvrModel fit_svr(const ProportionTrainingSet& set, const HyperGrid& grid, std::uint64_t seed, int folds = 3);

inline constexpr double kProportionFloor = 1e-6;

/// Clips raw outputs to [1e-6, 1] and rescales each row to sum to one.
Matrix normalize_proportions(const Matrix& raw);

/// normalize_proportions(model.predict_raw(features)).
Matrix predict_proportions(const ProportionModel& model, const Matrix& features);

nlohmann::json to_json(const ProportionModel& model);
ProportionModel proportion_model_from_json(const nlohmann::json& doc);

}  // namespace hfc
