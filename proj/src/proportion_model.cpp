#include "hfc/proportion_model.hpp"

#include <algorithm>
#include <cmath>

namespace hfc {

namespace {

std::vector<double> range(double first, double last, double step) {
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((last - first) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(std::round((first + i * step) * 1e9) / 1e9);
    return out;
}

std::size_t index_of(const std::vector<double>& values, double v) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i] - v) < 1e-12) return i;
    }
    return 0;
}

HyperParameter param(std::string name, std::vector<double> candidates, double initial) {
    const auto idx = index_of(candidates, initial);
    return {std::move(name), std::move(candidates), idx};
}

double get(const ParamMap& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

const char* kernel_name(KernelType k) {
    switch (k) {
        case KernelType::linear: return "linear";
        case KernelType::polynomial: return "polynomial";
        case KernelType::rbf: return "rbf";
    }
    return "?";
}

KernelType parse_kernel(const std::string& s) {
    if (s == "linear") return KernelType::linear;
    if (s == "polynomial") return KernelType::polynomial;
    if (s == "rbf") return KernelType::rbf;
    throw InvalidInput("unknown kernel '" + s + "'");
}

nlohmann::json matrix_json(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index cols_if_empty = 0) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j.at(i).size()) != cols) throw InvalidInput("model json: ragged matrix");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
    }
    return m;
}

nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const nlohmann::json& j) {
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string_view family_name(ModelFamily family) {
    switch (family) {
        case ModelFamily::gbt: return "gbt";
        case ModelFamily::mlp: return "mlp";
        case ModelFamily::svr: return "svr";
    }
    return "?";
}

ModelFamily parse_family(std::string_view name) {
    if (name == "gbt") return ModelFamily::gbt;
    if (name == "mlp") return ModelFamily::mlp;
    if (name == "svr") return ModelFamily::svr;
    throw InvalidInput("unknown model family '" + std::string(name) + "' (expected gbt, mlp or svr)");
}

HyperGrid paper_grid(ModelFamily family) {
    switch (family) {
        case ModelFamily::gbt:
            return {{param("eta", range(0.01, 0.05, 0.01), 0.05), param("subsample", range(0.3, 1.0, 0.1), 1.0),
                     param("colsample", range(0.3, 1.0, 0.1), 1.0), param("rounds", range(100, 500, 100), 100),
                     param("max_depth", range(2, 10, 1), 3)}};
        case ModelFamily::mlp:
            return {{param("hidden", {1, 11, 21, 31, 41}, 11), param("decay", range(0.0, 0.3, 0.1), 0.0),
                     param("activation", {0, 1}, 0)}};
        case ModelFamily::svr:
            return {{param("kernel", {0, 1, 2}, 2), param("gamma", range(0.1, 1.0, 0.1), 0.1),
                     param("cost", range(1, 100, 1), 1)}};
    }
    return {};
}

HyperGrid compact_grid(ModelFamily family) {
    switch (family) {
        case ModelFamily::gbt:
            return {{param("eta", {0.01, 0.03, 0.05}, 0.05), param("subsample", {0.7, 1.0}, 1.0),
                     param("colsample", {0.6, 1.0}, 1.0), param("rounds", {100, 300}, 100),
                     param("max_depth", {2, 3, 4}, 3)}};
        case ModelFamily::mlp:
            return {{param("hidden", {1, 11}, 11), param("decay", {0.0, 0.1}, 0.0), param("activation", {0, 1}, 0)}};
        case ModelFamily::svr:
            return {{param("kernel", {0, 2}, 2), param("gamma", {0.1, 0.5, 1.0}, 0.1), param("cost", {1, 10, 100}, 1)}};
    }
    return {};
}

GbtParams gbt_params(const ParamMap& params) {
    GbtParams p;
    p.eta = get(params, "eta", p.eta);
    p.rounds = static_cast<int>(std::lround(get(params, "rounds", p.rounds)));
    p.max_depth = static_cast<int>(std::lround(get(params, "max_depth", p.max_depth)));
    p.subsample = get(params, "subsample", p.subsample);
    p.colsample = get(params, "colsample", p.colsample);
    p.lambda = get(params, "lambda", p.lambda);
    return p;
}

MlpParams mlp_params(const ParamMap& params) {
    MlpParams p;
    p.hidden = static_cast<int>(std::lround(get(params, "hidden", p.hidden)));
    p.decay = get(params, "decay", p.decay);
    p.activation = get(params, "activation", 0.0) > 0.5 ? Activation::sigmoid : Activation::linear;
    p.learning_rate = get(params, "learning_rate", p.learning_rate);
    p.epochs = static_cast<int>(std::lround(get(params, "epochs", p.epochs)));
    return p;
}

SvrParams svr_params(const ParamMap& params) {
    SvrParams p;
    const auto k = std::lround(get(params, "kernel", 2.0));
    p.kernel.type = k == 0 ? KernelType::linear : k == 1 ? KernelType::polynomial : KernelType::rbf;
    p.kernel.gamma = get(params, "gamma", p.kernel.gamma);
    p.cost = get(params, "cost", p.cost);
    p.epsilon = get(params, "epsilon", p.epsilon);
    return p;
}

Trainer make_trainer(ModelFamily family) {
    switch (family) {
        case ModelFamily::gbt:
            return [](const Matrix& tx, const Matrix& ty, const Matrix& vx, const ParamMap& p, std::uint64_t seed) {
                return train_gbt(tx, ty, gbt_params(p), seed).predict(vx);
            };
        case ModelFamily::mlp:
            return [](const Matrix& tx, const Matrix& ty, const Matrix& vx, const ParamMap& p, std::uint64_t seed) {
                return train_mlp(tx, ty, mlp_params(p), seed).predict(vx);
            };
        case ModelFamily::svr:
            return [](const Matrix& tx, const Matrix& ty, const Matrix& vx, const ParamMap& p, std::uint64_t) {
                return train_svr(tx, ty, svr_params(p)).predict(vx);
            };
    }
    throw InvalidInput("unknown model family");
}

Matrix ProportionModel::predict_raw(const Matrix& features) const {
    const Matrix x = scaled_inputs() ? scaler.transform(features) : features;
    return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

ProportionModel fit_proportion_model(const ProportionTrainingSet& set, ModelFamily family,
                                     const ProportionFitOptions& options, std::uint64_t seed) {
    ProportionModel out;
    out.family = family;
    out.group = set.group;
    out.lags = set.lags;
    out.scaler = set.scaler;
    const Matrix x = out.scaled_inputs() ? set.scaler.transform(set.features) : set.features;

    const auto search = grid_search(make_trainer(family), x, set.targets, options.grid, options.folds, seed, options.mode);
    out.hyperparameters = search.best;
    out.validation_rmse = search.validation_rmse;
    switch (family) {
        case ModelFamily::gbt: out.model = train_gbt(x, set.targets, gbt_params(search.best), seed); break;
        case ModelFamily::mlp: out.model = train_mlp(x, set.targets, mlp_params(search.best), seed); break;
        case ModelFamily::svr: out.model = train_svr(x, set.targets, svr_params(search.best)); break;
    }
    return out;
}

GbtModel fit_gbt(const ProportionTrainingSet& set, const HyperGrid& grid, std::uint64_t seed, int folds) {
    return std::get<GbtModel>(fit_proportion_model(set, ModelFamily::gbt, {grid, folds}, seed).model);
}

MlpModel fit_mlp(const ProportionTrainingSet& set, const HyperGrid& grid, std::uint64_t seed, int folds) {
    return std::get<MlpModel>(fit_proportion_model(set, ModelFamily::mlp, {grid, folds}, seed).model);
}

SvrModel fit_svr(const ProportionTrainingSet& set, const HyperGrid& grid, std::uint64_t seed, int folds) {
    return std::get<SvrModel>(fit_proportion_model(set, ModelFamily::svr, {grid, folds}, seed).model);
}

Matrix normalize_proportions(const Matrix& raw) {
    Matrix out = raw.unaryExpr([](double v) { return std::isnan(v) ? kProportionFloor : std::clamp(v, kProportionFloor, 1.0); });
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        if ((out.row(r).array() <= kProportionFloor).all()) {
            warn("proportions: every child clipped to the floor; using a uniform split");
            out.row(r).setConstant(1.0 / static_cast<double>(out.cols()));
            continue;
        }
        out.row(r) /= out.row(r).sum();
    }
    return out;
}

Matrix predict_proportions(const ProportionModel& model, const Matrix& features) {
    return normalize_proportions(model.predict_raw(features));
}

nlohmann::json to_json(const ProportionModel& model) {
    nlohmann::json doc;
    doc["format"] = "hfc-proportion-model";
    doc["version"] = 1;
    doc["family"] = std::string(family_name(model.family));
    doc["group"] = {{"parent", model.group.parent}, {"children", model.group.children}};
    doc["lags"] = model.lags;
    doc["scaler"] = {{"lower", model.scaler.lower}, {"upper", model.scaler.upper}};
    doc["hyperparameters"] = model.hyperparameters;
    doc["validation_rmse"] = model.validation_rmse;

    nlohmann::json body;
    if (const auto* g = std::get_if<GbtModel>(&model.model)) {
        body["eta"] = g->params.eta;
        body["rounds"] = g->params.rounds;
        body["max_depth"] = g->params.max_depth;
        body["subsample"] = g->params.subsample;
        body["colsample"] = g->params.colsample;
        body["lambda"] = g->params.lambda;
        body["base_score"] = g->base_score;
        auto outputs = nlohmann::json::array();
        for (const auto& seq : g->trees) {
            auto trees = nlohmann::json::array();
            for (const auto& t : seq) {
                auto nodes = nlohmann::json::array();
                for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
                trees.push_back(std::move(nodes));
            }
            outputs.push_back(std::move(trees));
        }
        body["trees"] = std::move(outputs);
    } else if (const auto* m = std::get_if<MlpModel>(&model.model)) {
        body["hidden"] = m->params.hidden;
        body["activation"] = m->params.activation == Activation::sigmoid ? "sigmoid" : "linear";
        body["learning_rate"] = m->params.learning_rate;
        body["decay"] = m->params.decay;
        body["epochs"] = m->params.epochs;
        body["w1"] = matrix_json(m->w1);
        body["b1"] = vector_json(m->b1);
        body["w2"] = matrix_json(m->w2);
        body["b2"] = vector_json(m->b2);
    } else if (const auto* s = std::get_if<SvrModel>(&model.model)) {
        body["kernel"] = kernel_name(s->params.kernel.type);
        body["gamma"] = s->params.kernel.gamma;
        body["coef0"] = s->params.kernel.coef0;
        body["degree"] = s->params.kernel.degree;
        body["cost"] = s->params.cost;
        body["epsilon"] = s->params.epsilon;
        body["support"] = matrix_json(s->support);
        body["coef"] = s->coef;
        body["bias"] = s->bias;
    }
    doc["model"] = std::move(body);
    return doc;
}

ProportionModel proportion_model_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format") != "hfc-proportion-model") throw InvalidInput("model json: unexpected format tag");
        ProportionModel out;
        out.family = parse_family(doc.at("family").get<std::string>());
        out.group.parent = doc.at("group").at("parent").get<std::string>();
        out.group.children = doc.at("group").at("children").get<std::vector<std::string>>();
        out.lags = doc.at("lags").get<int>();
        out.scaler.lower = doc.at("scaler").at("lower").get<std::vector<double>>();
        out.scaler.upper = doc.at("scaler").at("upper").get<std::vector<double>>();
        out.hyperparameters = doc.at("hyperparameters").get<ParamMap>();
        out.validation_rmse = doc.at("validation_rmse").get<double>();
        const auto& body = doc.at("model");
        switch (out.family) {
            case ModelFamily::gbt: {
                GbtModel g;
                g.params.eta = body.at("eta");
                g.params.rounds = body.at("rounds");
                g.params.max_depth = body.at("max_depth");
                g.params.subsample = body.at("subsample");
                g.params.colsample = body.at("colsample");
                g.params.lambda = body.at("lambda");
                g.base_score = body.at("base_score").get<std::vector<double>>();
                for (const auto& seq : body.at("trees")) {
                    std::vector<RegressionTree> trees;
                    for (const auto& t : seq) {
                        RegressionTree tree;
                        for (const auto& n : t) {
                            tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                                  n.at(3).get<int>(), n.at(4).get<double>()});
                        }
                        trees.push_back(std::move(tree));
                    }
                    g.trees.push_back(std::move(trees));
                }
                out.model = std::move(g);
                break;
            }
            case ModelFamily::mlp: {
                MlpModel m;
                m.params.hidden = body.at("hidden");
                m.params.activation = body.at("activation") == "sigmoid" ? Activation::sigmoid : Activation::linear;
                m.params.learning_rate = body.at("learning_rate");
                m.params.decay = body.at("decay");
                m.params.epochs = body.at("epochs");
                m.w1 = matrix_from_json(body.at("w1"));
                m.b1 = vector_from_json(body.at("b1"));
                m.w2 = matrix_from_json(body.at("w2"));
                m.b2 = vector_from_json(body.at("b2"));
                out.model = std::move(m);
                break;
            }
            case ModelFamily::svr: {
                SvrModel s;
                s.params.kernel.type = parse_kernel(body.at("kernel").get<std::string>());
                s.params.kernel.gamma = body.at("gamma");
                s.params.kernel.coef0 = body.at("coef0");
                s.params.kernel.degree = body.at("degree");
                s.params.cost = body.at("cost");
                s.params.epsilon = body.at("epsilon");
                s.support = matrix_from_json(body.at("support"), static_cast<Eigen::Index>(out.scaler.lower.size()));
                s.coef = body.at("coef").get<std::vector<std::vector<double>>>();
                s.bias = body.at("bias").get<std::vector<double>>();
                out.model = std::move(s);
                break;
            }
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("model json: ") + e.what());
    }
}

}  // namespace hfc
