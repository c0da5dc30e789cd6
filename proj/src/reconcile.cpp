#include "hfc/reconcile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hfc {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 11> kMethodNames{{
    {Method::dhf_gbt, "DHF_GBT"},
    {Method::dhf_mlp, "DHF_MLP"},
    {Method::dhf_svr, "DHF_SVR"},
    {Method::mint_sample, "MINT_SAMPLE"},
    {Method::wls, "WLS"},
    {Method::mint_shrink, "MINT_SHRINK"},
    {Method::td_gs1, "TD_GS1"},
    {Method::td_gs2, "TD_GS2"},
    {Method::tdfp, "TDFP"},
    {Method::cmo, "CMO"},
    {Method::bu, "BU"},
}};

struct GroupRows {
    Eigen::Index parent;
    std::vector<Eigen::Index> children;
};

GroupRows resolve_group(const SeriesPanel& panel, const ProportionGroup& group) {
    auto find_row = [&](const std::string& id) {
        auto it = std::find(panel.node_ids.begin(), panel.node_ids.end(), id);
        if (it == panel.node_ids.end()) throw InvalidInput("proportions: node '" + id + "' not in panel");
        return static_cast<Eigen::Index>(it - panel.node_ids.begin());
    };
    if (group.children.empty()) throw InvalidInput("proportions: group '" + group.parent + "' has no children");
    GroupRows rows{find_row(group.parent), {}};
    for (const auto& c : group.children) rows.children.push_back(find_row(c));
    return rows;
}

Eigen::LLT<Matrix> cholesky_or_throw(const Matrix& w, std::string_view who) {
    if (w.rows() != w.cols()) throw InvalidInput(std::string(who) + ": W must be square");
    Eigen::LLT<Matrix> llt(w);
    if (llt.info() != Eigen::Success || (w.diagonal().array() <= 0.0).any()) {
        throw SingularMatrix(std::string(who) + ": W is not positive definite (Cholesky failed)");
    }
    return llt;
}

Matrix centered_rows(const Matrix& residuals) {
    Vector mean = residuals.rowwise().mean();
    return residuals.colwise() - mean;
}

}  // namespace

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = [] {
        std::vector<Method> v;
        for (const auto& [m, name] : kMethodNames) v.push_back(m);
        return v;
    }();
    return methods;
}

std::string_view method_name(Method method) {
    for (const auto& [m, name] : kMethodNames) {
        if (m == method) return name;
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (const auto& [m, n] : kMethodNames) {
        if (n == name) return m;
    }
    std::string valid;
    for (const auto& [m, n] : kMethodNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw InvalidInput("unknown method '" + std::string(name) + "'; valid methods: " + valid);
}

ProportionGroup top_down_group(const Hierarchy& hierarchy) {
    ProportionGroup g{hierarchy.node(hierarchy.level_nodes(0).front()).id, {}};
    for (auto leaf : hierarchy.bottom_nodes()) g.children.push_back(hierarchy.node(leaf).id);
    return g;
}

ProportionGroup leaf_group(const Hierarchy& hierarchy, std::size_t node_index) {
    ProportionGroup g{hierarchy.node(node_index).id, {}};
    for (auto leaf : hierarchy.leaves_under(node_index)) g.children.push_back(hierarchy.node(leaf).id);
    return g;
}

PMatrix p_bottom_up(const Matrix& summing) {
    const auto m = summing.rows();
    const auto mk = summing.cols();
    if (m < mk) throw InvalidInput("p_bottom_up: S has fewer rows than columns");
    PMatrix p{Matrix::Zero(mk, m), Method::bu};
    p.entries.rightCols(mk).setIdentity();
    return p;
}

ProportionVector td_proportions_gs1(const SeriesPanel& panel, const ProportionGroup& group) {
    const auto rows = resolve_group(panel, group);
    std::vector<double> p(rows.children.size(), 0.0);
    int used = 0;
    for (Eigen::Index t = 0; t < panel.week_count(); ++t) {
        const double total = panel.sales(rows.parent, t);
        if (!(total > 0.0)) continue;
        ++used;
        for (std::size_t j = 0; j < p.size(); ++j) p[j] += panel.sales(rows.children[j], t) / total;
    }
    if (used == 0) {
        throw InvalidInput("td_proportions_gs1: parent '" + group.parent + "' has no week with positive total");
    }
    for (auto& v : p) v /= used;
    return {std::move(p), ProportionBasis::historical_avg};
}

ProportionVector td_proportions_gs2(const SeriesPanel& panel, const ProportionGroup& group) {
    const auto rows = resolve_group(panel, group);
    const double parent_mean = panel.sales.row(rows.parent).mean();
    if (!(parent_mean > 0.0)) {
        throw InvalidInput("td_proportions_gs2: parent '" + group.parent + "' has zero mean total");
    }
    std::vector<double> p(rows.children.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = panel.sales.row(rows.children[j]).mean() / parent_mean;
    return {std::move(p), ProportionBasis::avg_of_ratios};
}

ProportionVector tdfp_proportions(const BaseForecasts& base, Eigen::Index h, const Hierarchy& hierarchy) {
    if (base.values.rows() != static_cast<Eigen::Index>(hierarchy.size())) {
        throw InvalidInput("tdfp_proportions: base forecasts must cover every node");
    }
    if (h < 0 || h >= base.values.cols()) throw InvalidInput("tdfp_proportions: horizon out of range");
    auto forecast = [&](std::size_t node) { return base.values(static_cast<Eigen::Index>(node), h); };

    std::vector<double> p;
    p.reserve(hierarchy.bottom_count());
    for (auto leaf : hierarchy.bottom_nodes()) {
        double product = 1.0;
        std::size_t at = leaf;
        while (auto parent = hierarchy.node(at).parent) {
            double siblings = 0.0;
            for (auto s : hierarchy.node(*parent).children) siblings += forecast(s);
            if (!(siblings > 0.0)) {
                throw InvalidInput("tdfp_proportions: children of '" + hierarchy.node(*parent).id +
                                   "' have zero total forecast at horizon " + std::to_string(h + 1));
            }
            product *= forecast(at) / siblings;
            at = *parent;
        }
        p.push_back(product);
    }
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= sum;
    return {std::move(p), ProportionBasis::forecasted};
}

PMatrix p_top_down(const ProportionVector& proportions, Eigen::Index node_count) {
    const auto mk = static_cast<Eigen::Index>(proportions.values.size());
    if (mk == 0 || node_count < mk) throw InvalidInput("p_top_down: bad dimensions");
    const double sum = std::accumulate(proportions.values.begin(), proportions.values.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidInput("p_top_down: proportions sum to " + format_double(sum) + ", expected 1");
    }
    Method tag = Method::td_gs1;
    if (proportions.basis == ProportionBasis::avg_of_ratios) tag = Method::td_gs2;
    if (proportions.basis == ProportionBasis::forecasted) tag = Method::tdfp;
    PMatrix p{Matrix::Zero(mk, node_count), tag};
    for (Eigen::Index j = 0; j < mk; ++j) p.entries(j, 0) = proportions.values[static_cast<std::size_t>(j)];
    return p;
}

PMatrix p_mint(const Matrix& summing, const CovarianceEstimate& w, Method tag) {
    if (w.w.rows() != summing.rows()) throw InvalidInput("p_mint: W and S dimensions differ");
    auto llt = cholesky_or_throw(w.w, "p_mint");
    Matrix winv_s = llt.solve(summing);             // W^-1 S
    Matrix normal = summing.transpose() * winv_s;  // S' W^-1 S
    Eigen::LLT<Matrix> normal_llt(normal);
    if (normal_llt.info() != Eigen::Success) throw SingularMatrix("p_mint: S' W^-1 S is singular");
    return PMatrix{normal_llt.solve(winv_s.transpose()), tag};
}

PMatrix p_wls(const Matrix& summing, const CovarianceEstimate& diagonal) {
    Vector d = diagonal.w.diagonal();
    if ((d.array() <= 0.0).any()) throw SingularMatrix("p_wls: variances must be positive");
    CovarianceEstimate diag{d.asDiagonal(), CovarianceKind::diagonal, 0.0};
    return p_mint(summing, diag, Method::wls);
}

CovarianceEstimate estimate_w_sample(const Matrix& residuals) {
    if (residuals.cols() < 2) throw InvalidInput("estimate_w_sample: need at least 2 residual columns");
    if (residuals.cols() < residuals.rows()) {
        warn("sample covariance with " + std::to_string(residuals.cols()) + " observations for " +
             std::to_string(residuals.rows()) + " series is singular; using shrinkage estimator");
        return estimate_w_shrink(residuals);
    }
    Matrix x = centered_rows(residuals);
    Matrix w = x * x.transpose() / static_cast<double>(residuals.cols() - 1);
    return {(w + w.transpose()) / 2.0, CovarianceKind::sample, 0.0};
}

CovarianceEstimate estimate_w_diagonal(const Matrix& residuals) {
    if (residuals.cols() < 2) throw InvalidInput("estimate_w_diagonal: need at least 2 residual columns");
    Matrix x = centered_rows(residuals);
    Vector var = x.rowwise().squaredNorm() / static_cast<double>(residuals.cols() - 1);
    return {var.asDiagonal(), CovarianceKind::diagonal, 0.0};
}

CovarianceEstimate estimate_w_shrink(const Matrix& residuals, std::optional<double> forced_lambda) {
    const auto m = residuals.rows();
    const auto n = residuals.cols();
    if (n < 3) throw InvalidInput("estimate_w_shrink: need at least 3 residual columns");
    const double nd = static_cast<double>(n);

    Matrix x = centered_rows(residuals);
    Matrix sample = x * x.transpose() / (nd - 1.0);
    sample = (sample + sample.transpose()) / 2.0;
    Vector sd = sample.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(sd(i) > 0.0)) {
            throw InvalidInput("estimate_w_shrink: residual row " + std::to_string(i) + " has zero variance");
        }
    }

    double lambda = 0.0;
    if (forced_lambda) {
        if (*forced_lambda < 0.0 || *forced_lambda > 1.0) throw InvalidInput("estimate_w_shrink: lambda outside [0, 1]");
        lambda = *forced_lambda;
    } else {
        Matrix z = sd.cwiseInverse().asDiagonal() * x;  // standardized rows
        double num = 0.0, den = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i + 1; j < m; ++j) {
                Vector w_ij = z.row(i).cwiseProduct(z.row(j)).transpose();
                const double w_bar = w_ij.mean();
                const double var_r = nd / std::pow(nd - 1.0, 3) * (w_ij.array() - w_bar).square().sum();
                const double r = nd / (nd - 1.0) * w_bar;
                num += var_r;
                den += r * r;
            }
        }
        lambda = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 1.0;
    }
    Matrix target = sample.diagonal().asDiagonal();
    Matrix w = lambda * target + (1.0 - lambda) * sample;
    return {w, CovarianceKind::shrinkage, lambda};
}

ReconciledForecasts from_bottom(Matrix bottom, const Matrix& summing, Method tag) {
    if (bottom.rows() != summing.cols()) throw InvalidInput("reconcile: bottom estimates do not match S");
    ReconciledForecasts out;
    out.tag = tag;
    out.floored = (bottom.array() < 0.0).any();
    if (out.floored) bottom = bottom.cwiseMax(0.0);
    out.values = summing * bottom;
    out.bottom_estimates = std::move(bottom);
    return out;
}

ReconciledForecasts reconcile(const PMatrix& p, const Matrix& summing, const Matrix& base) {
    if (p.entries.rows() != summing.cols() || p.entries.cols() != summing.rows()) {
        throw InvalidInput("reconcile: P must be " + std::to_string(summing.cols()) + " x " +
                           std::to_string(summing.rows()));
    }
    if (base.rows() != summing.rows()) throw InvalidInput("reconcile: base forecasts must have one row per node");
    return from_bottom(p.entries * base, summing, p.tag);
}

Matrix reconciled_variance(const Matrix& summing, const Matrix& w) {
    auto llt = cholesky_or_throw(w, "reconciled_variance");
    Matrix normal = summing.transpose() * llt.solve(summing);
    Eigen::LLT<Matrix> normal_llt(normal);
    if (normal_llt.info() != Eigen::Success) throw SingularMatrix("reconciled_variance: S' W^-1 S is singular");
    Matrix v = summing * normal_llt.solve(summing.transpose());
    return (v + v.transpose()) / 2.0;
}

double reconciled_trace(const Matrix& summing, const Matrix& p, const Matrix& w) {
    Matrix sp = summing * p;
    return (sp * w * sp.transpose()).trace();
}

ReconciledForecasts reconcile_tdfp(const BaseForecasts& base, const Hierarchy& hierarchy, const Matrix& summing) {
    const auto horizon = base.values.cols();
    Matrix bottom(summing.cols(), horizon);
    for (Eigen::Index h = 0; h < horizon; ++h) {
        auto p = p_top_down(tdfp_proportions(base, h, hierarchy), summing.rows());
        bottom.col(h) = p.entries * base.values.col(h);
    }
    return from_bottom(std::move(bottom), summing, Method::tdfp);
}

ReconciledForecasts conventional_middle_out(const Matrix& middle_forecasts, const SeriesPanel& history,
                                            const Hierarchy& hierarchy) {
    if (hierarchy.level_count() < 2) throw InvalidInput("middle-out: hierarchy has no middle level");
    const auto& middle = hierarchy.level_nodes(1);
    if (middle_forecasts.rows() != static_cast<Eigen::Index>(middle.size())) {
        throw InvalidInput("middle-out: expected one forecast row per level-1 node");
    }
    const Matrix summing = summing_matrix(hierarchy);
    Matrix bottom = Matrix::Zero(summing.cols(), middle_forecasts.cols());
    for (std::size_t g = 0; g < middle.size(); ++g) {
        const auto group = leaf_group(hierarchy, middle[g]);
        const auto props = td_proportions_gs1(history, group);
        const auto leaves = hierarchy.leaves_under(middle[g]);
        for (std::size_t j = 0; j < leaves.size(); ++j) {
            const auto row = static_cast<Eigen::Index>(hierarchy.bottom_position(leaves[j]));
            bottom.row(row) = props.values[j] * middle_forecasts.row(static_cast<Eigen::Index>(g));
        }
    }
    return from_bottom(std::move(bottom), summing, Method::cmo);
}

double coherence_error(const ReconciledForecasts& forecasts, const Matrix& summing) {
    Matrix implied = summing * forecasts.bottom_estimates;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < implied.rows(); ++i) {
        for (Eigen::Index h = 0; h < implied.cols(); ++h) {
            const double v = forecasts.values(i, h);
            worst = std::max(worst, std::abs(v - implied(i, h)) / std::max(1.0, std::abs(v)));
        }
    }
    return worst;
}

std::string p_matrix_csv(const PMatrix& p, const Hierarchy& hierarchy) {
    std::ostringstream out;
    out << "bottom_node";
    for (const auto& n : hierarchy.nodes()) out << ',' << n.id;
    out << '\n';
    for (Eigen::Index j = 0; j < p.entries.rows(); ++j) {
        out << hierarchy.node(hierarchy.bottom_nodes()[static_cast<std::size_t>(j)]).id;
        for (Eigen::Index i = 0; i < p.entries.cols(); ++i) out << ',' << format_double(p.entries(j, i));
        out << '\n';
    }
    return out.str();
}

std::string reconciled_csv(const ReconciledForecasts& forecasts, const Hierarchy& hierarchy) {
    std::ostringstream out;
    out << "node_id,horizon,forecast\n";
    for (Eigen::Index i = 0; i < forecasts.values.rows(); ++i) {
        for (Eigen::Index h = 0; h < forecasts.values.cols(); ++h) {
            out << hierarchy.node(static_cast<std::size_t>(i)).id << ',' << h + 1 << ','
                << format_double(forecasts.values(i, h)) << '\n';
        }
    }
    return out.str();
}

}  // namespace hfc
