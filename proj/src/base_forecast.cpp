#include "hfc/base_forecast.hpp"

#include <algorithm>
#include <exception>
#include <limits>

namespace hfc {

namespace {

struct WindowFit {
    ArxModel model;
    double sse = 0.0;
    Eigen::Index rows = 0;
};

std::string column_name(int j, int order, bool has_price) {
    if (j == 0) return "intercept";
    if (j <= order) return "lag" + std::to_string(j);
    return has_price ? "log_price" : "column" + std::to_string(j);
}

// First column lying in the span of the columns before it, or -1.
int first_collinear_column(const Matrix& design) {
    const auto n = design.rows();
    Matrix basis(n, design.cols());
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
        Vector v = design.col(j);
        const double norm = v.norm();
        if (norm == 0.0) return static_cast<int>(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index q = 0; q < kept; ++q) v -= basis.col(q).dot(v) * basis.col(q);
        }
        if (v.norm() <= 1e-9 * norm) return static_cast<int>(j);
        basis.col(kept++) = v / v.norm();
    }
    return -1;
}

void validate_series(std::span<const double> sales, std::span<const double> price) {
    if (sales.size() != price.size()) throw InvalidInput("ARX: sales and price lengths differ");
    for (double s : sales) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput("ARX: sales must be finite and non-negative");
    }
    for (double p : price) {
        if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("ARX: price must be finite and positive");
    }
}

// OLS over rows t = start..n-1 (start >= order).
WindowFit fit_window(const std::vector<double>& y, const std::vector<double>& log_price, int order,
                     std::size_t start) {
    const auto n = y.size();
    const auto rows = static_cast<Eigen::Index>(n - start);

    WindowFit out;
    out.rows = rows;
    ArxModel& m = out.model;
    m.order = order;
    m.ar_coeffs.assign(static_cast<std::size_t>(order), 0.0);

    const bool constant_series =
        std::all_of(y.begin() + static_cast<std::ptrdiff_t>(start - order), y.end(), [&](double v) { return v == y[start]; });
    if (constant_series) {
        m.intercept = y[start];
        m.train_residuals.assign(n - static_cast<std::size_t>(order), 0.0);
        m.train_fitted.assign(n - static_cast<std::size_t>(order), y[start]);
        return out;
    }

    const bool has_price = std::any_of(log_price.begin() + static_cast<std::ptrdiff_t>(start), log_price.end(),
                                       [&](double v) { return v != log_price[start]; });
    const int cols = 1 + order + (has_price ? 1 : 0);
    Matrix design(rows, cols);
    Vector response(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = start + static_cast<std::size_t>(r);
        design(r, 0) = 1.0;
        for (int i = 1; i <= order; ++i) design(r, i) = y[t - static_cast<std::size_t>(i)];
        if (has_price) design(r, cols - 1) = log_price[t];
        response(r) = y[t];
    }
    if (int bad = first_collinear_column(design); bad >= 0) {
        auto name = column_name(bad, order, has_price);
        throw SingularDesign(name, "ARX(" + std::to_string(order) + "): singular design, column '" + name +
                                       "' is collinear with earlier columns");
    }
    Vector beta = design.householderQr().solve(response);
    m.intercept = beta(0);
    for (int i = 0; i < order; ++i) m.ar_coeffs[static_cast<std::size_t>(i)] = beta(1 + i);
    m.uses_price = has_price;
    m.price_coeff = has_price ? beta(cols - 1) : 0.0;

    Vector fitted = design * beta;
    Vector resid = response - fitted;
    out.sse = resid.squaredNorm();
    m.train_residuals.assign(resid.data(), resid.data() + resid.size());
    m.train_fitted.assign(fitted.data(), fitted.data() + fitted.size());
    return out;
}

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

std::pair<std::vector<double>, std::vector<double>> transform(std::span<const double> sales,
                                                              std::span<const double> price) {
    std::vector<double> y(sales.size()), lp(price.size());
    std::transform(sales.begin(), sales.end(), y.begin(), log_transform);
    std::transform(price.begin(), price.end(), lp.begin(), [](double p) { return std::log(p); });
    return {std::move(y), std::move(lp)};
}

}  // namespace

ArxModel fit_arx(std::span<const double> sales, std::span<const double> price, int order) {
    if (order < 0) throw InvalidInput("ARX: order must be >= 0");
    validate_series(sales, price);
    if (sales.size() < static_cast<std::size_t>(order) + 5) {
        throw InvalidInput("ARX(" + std::to_string(order) + "): need at least " + std::to_string(order + 5) +
                           " observations, got " + std::to_string(sales.size()));
    }
    auto [y, lp] = transform(sales, price);
    auto fit = fit_window(y, lp, order, static_cast<std::size_t>(order));
    fit.model.residual_variance = sample_variance(fit.model.train_residuals);
    return fit.model;
}

int select_order(std::span<const double> sales, std::span<const double> price, std::span<const int> order_grid) {
    if (order_grid.empty()) throw InvalidInput("select_order: empty order grid");
    validate_series(sales, price);
    std::vector<int> grid(order_grid.begin(), order_grid.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.front() < 0) throw InvalidInput("select_order: negative order");
    const int max_order = grid.back();
    if (sales.size() < static_cast<std::size_t>(max_order) + 5) {
        throw InvalidInput("select_order: need at least max(order) + 5 = " + std::to_string(max_order + 5) +
                           " observations");
    }
    auto [y, lp] = transform(sales, price);

    int best = -1;
    double best_aic = std::numeric_limits<double>::infinity();
    std::string last_error;
    for (int p : grid) {
        WindowFit fit;
        try {
            fit = fit_window(y, lp, p, static_cast<std::size_t>(max_order));
        } catch (const SingularDesign& e) {
            last_error = e.what();
            continue;
        }
        const double n_eff = static_cast<double>(fit.rows);
        const double aic = fit.sse <= 0.0 ? -std::numeric_limits<double>::infinity()
                                          : n_eff * std::log(fit.sse / n_eff) + 2.0 * (p + 2);
        if (best < 0 || aic < best_aic) {
            best = p;
            best_aic = aic;
        }
    }
    if (best < 0) throw SingularMatrix("select_order: every candidate order is singular (" + last_error + ")");
    return best;
}

std::vector<double> forecast_arx(const ArxModel& model, std::span<const double> history,
                                 std::span<const double> future_price) {
    if (history.size() < static_cast<std::size_t>(model.order)) {
        throw InvalidInput("forecast_arx: history shorter than model order");
    }
    for (double p : future_price) {
        if (!(p > 0.0)) throw InvalidInput("forecast_arx: future price must be positive");
    }
    std::vector<double> y;
    y.reserve(history.size() + future_price.size());
    for (double s : history) y.push_back(log_transform(s));

    std::vector<double> out;
    out.reserve(future_price.size());
    for (double price : future_price) {
        double value = model.intercept;
        for (int i = 0; i < model.order; ++i) {
            value += model.ar_coeffs[static_cast<std::size_t>(i)] * y[y.size() - 1 - static_cast<std::size_t>(i)];
        }
        if (model.uses_price) value += model.price_coeff * std::log(price);
        y.push_back(value);
        out.push_back(std::max(0.0, inverse_log_transform(value)));
    }
    return out;
}

std::vector<double> naive_forecast(std::span<const double> sales, int horizon) {
    if (sales.empty()) throw InvalidInput("naive_forecast: empty series");
    if (horizon < 0) throw InvalidInput("naive_forecast: negative horizon");
    return std::vector<double>(static_cast<std::size_t>(horizon), sales.back());
}

BaseForecasts forecast_all_nodes(const SeriesPanel& panel, Eigen::Index train_weeks, int horizon,
                                 const BaseForecastOptions& options) {
    if (options.order_grid.empty()) throw InvalidInput("forecast_all_nodes: empty order grid");
    if (horizon < 1) throw InvalidInput("forecast_all_nodes: horizon must be >= 1");
    if (train_weeks + horizon > panel.week_count()) {
        throw InvalidInput("forecast_all_nodes: train weeks + horizon exceeds panel length");
    }
    const int max_order = *std::max_element(options.order_grid.begin(), options.order_grid.end());
    const auto m = panel.node_count();
    const auto resid_len = train_weeks - max_order;

    BaseForecasts out;
    out.node_ids = panel.node_ids;
    out.values = Matrix::Zero(m, horizon);
    out.residuals = Matrix::Zero(m, resid_len);
    out.models.resize(static_cast<std::size_t>(m));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m));

#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < m; ++i) {
        try {
            std::vector<double> sales(static_cast<std::size_t>(train_weeks)), price(sales.size());
            for (Eigen::Index t = 0; t < train_weeks; ++t) {
                sales[static_cast<std::size_t>(t)] = panel.sales(i, t);
                price[static_cast<std::size_t>(t)] = panel.price(i, t);
            }
            std::vector<double> future(static_cast<std::size_t>(horizon));
            for (int h = 0; h < horizon; ++h) future[static_cast<std::size_t>(h)] = panel.price(i, train_weeks + h);

            const int order = select_order(sales, price, options.order_grid);
            ArxModel model = fit_arx(sales, price, order);
            auto fc = forecast_arx(model, sales, future);
            for (int h = 0; h < horizon; ++h) out.values(i, h) = fc[static_cast<std::size_t>(h)];
            const auto offset = static_cast<std::size_t>(max_order - order);
            for (Eigen::Index r = 0; r < resid_len; ++r) {
                const auto k = offset + static_cast<std::size_t>(r);
                const auto t = static_cast<std::size_t>(max_order + r);
                out.residuals(i, r) = sales[t] - inverse_log_transform(model.train_fitted[k]);
            }
            out.models[static_cast<std::size_t>(i)] = std::move(model);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const SingularDesign& e) {
            throw SingularDesign(e.column(), "node '" + panel.node_ids[i] + "': " + e.what());
        } catch (const std::exception& e) {
            throw Error("node '" + panel.node_ids[i] + "': " + e.what());
        }
    }
    return out;
}

}  // namespace hfc
