#include "hfc/pipeline.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hfc {

namespace {

void check_windows(const GroupData& group, const PipelineOptions& options) {
    if (options.train_weeks < 1) throw InvalidInput("train_weeks must be >= 1");
    if (options.horizon < 1) throw InvalidInput("horizon must be >= 1");
    if (group.base_override) {
        if (group.base_override->cols() != options.horizon ||
            group.base_override->rows() != static_cast<Eigen::Index>(group.hierarchy.size())) {
            throw InvalidInput("group '" + group.id + "': base forecasts do not match nodes x horizon");
        }
        if (options.train_weeks > group.panel.week_count()) {
            throw InvalidInput("group '" + group.id + "': train_weeks exceeds panel length");
        }
        return;
    }
    if (options.train_weeks + options.horizon > group.panel.week_count()) {
        throw InvalidInput("group '" + group.id + "': train_weeks + horizon exceeds panel length " +
                           std::to_string(group.panel.week_count()));
    }
}

BaseForecasts base_for(const GroupData& group, const PipelineOptions& options) {
    if (group.base_override) {
        BaseForecasts base;
        base.node_ids = group.hierarchy.ids();
        base.values = *group.base_override;
        return base;
    }
    return forecast_all_nodes(group.panel, options.train_weeks, options.horizon);
}

const Matrix& residuals_of(const BaseForecasts& base, Method method) {
    if (base.residuals.cols() == 0) {
        throw InvalidInput(std::string(method_name(method)) + " needs in-sample residuals; none available");
    }
    return base.residuals;
}

}  // namespace

ReconciledForecasts run_method(Method method, const GroupData& group, const BaseForecasts& base,
                               const PipelineOptions& options) {
    const auto& h = group.hierarchy;
    const Matrix s = summing_matrix(h);
    const auto m = static_cast<Eigen::Index>(h.size());
    const auto history = group.panel.slice(0, options.train_weeks);
    switch (method) {
        case Method::bu: return reconcile(p_bottom_up(s), s, base.values);
        case Method::td_gs1:
            return reconcile(p_top_down(td_proportions_gs1(history, top_down_group(h)), m), s, base.values);
        case Method::td_gs2:
            return reconcile(p_top_down(td_proportions_gs2(history, top_down_group(h)), m), s, base.values);
        case Method::tdfp: return reconcile_tdfp(base, h, s);
        case Method::cmo: {
            if (h.level_count() < 3) throw InvalidInput("CMO needs a middle level");
            const auto& middle = h.level_nodes(1);
            Matrix rows(static_cast<Eigen::Index>(middle.size()), base.values.cols());
            for (std::size_t i = 0; i < middle.size(); ++i) {
                rows.row(static_cast<Eigen::Index>(i)) = base.values.row(static_cast<Eigen::Index>(middle[i]));
            }
            return conventional_middle_out(rows, history, h);
        }
        case Method::wls:
            return reconcile(p_wls(s, estimate_w_diagonal(residuals_of(base, method))), s, base.values);
        case Method::mint_sample: {
            const auto w = estimate_w_sample(residuals_of(base, method));
            auto out = reconcile(p_mint(s, w, Method::mint_sample), s, base.values);
            out.variance = reconciled_variance(s, w.w);
            return out;
        }
        case Method::mint_shrink: {
            const auto w = estimate_w_shrink(residuals_of(base, method));
            auto out = reconcile(p_mint(s, w, Method::mint_shrink), s, base.values);
            out.variance = reconciled_variance(s, w.w);
            return out;
        }
        case Method::dhf_gbt:
        case Method::dhf_mlp:
        case Method::dhf_svr: {
            const auto family = method == Method::dhf_gbt   ? ModelFamily::gbt
                                : method == Method::dhf_mlp ? ModelFamily::mlp
                                                            : ModelFamily::svr;
            return dhf_forecast(group.panel, h, options.train_weeks, base, family, options.dhf,
                                derive_seed(options.seed, group.id))
                .forecasts;
        }
    }
    throw InvalidInput("unhandled method");
}

GroupRun run_group(const GroupData& group, const PipelineOptions& options) {
    GroupRun run;
    run.group_id = group.id;
    if (options.methods.empty()) throw InvalidInput("method list is empty");
    BaseForecasts base;
    try {
        check_windows(group, options);
        base = base_for(group, options);
    } catch (const std::exception& e) {
        for (auto method : options.methods) run.failures.push_back({group.id, method, e.what()});
        return run;
    }
    if (options.train_weeks + options.horizon <= group.panel.week_count()) {
        run.actual = group.panel.sales.middleCols(options.train_weeks, options.horizon);
    }
    for (auto method : options.methods) {
        try {
            run.forecasts.emplace(method, run_method(method, group, base, options));
        } catch (const std::exception& e) {
            run.failures.push_back({group.id, method, e.what()});
        }
    }
    return run;
}

std::vector<GroupRun> run_groups(const std::vector<GroupData>& groups, const PipelineOptions& options) {
    std::vector<GroupRun> runs(groups.size());
    const int n = static_cast<int>(groups.size());
    const int jobs = std::max(1, options.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int g = 0; g < n; ++g) {
        runs[static_cast<std::size_t>(g)] = run_group(groups[static_cast<std::size_t>(g)], options);
    }
    return runs;
}

std::vector<GroupRun> run_groups_ref(const std::vector<GroupData>& groups, const PipelineOptions& options) {
    std::vector<GroupRun> runs;
    runs.reserve(groups.size());
    for (const auto& g : groups) runs.push_back(run_group(g, options));
    return runs;
}

EvalReport evaluate_runs(const std::vector<GroupRun>& runs, const std::vector<GroupData>& groups,
                         const std::vector<Window>& windows) {
    if (runs.size() != groups.size()) throw InvalidInput("evaluate_runs: runs and groups differ in length");
    std::vector<GroupEvaluation> evals;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].forecasts.empty()) continue;
        if (runs[i].actual.size() == 0) {
            throw InvalidInput("group '" + runs[i].group_id + "' has no held-out actuals to score");
        }
        evals.push_back({runs[i].group_id, &groups[i].hierarchy, runs[i].actual, runs[i].forecasts});
    }
    return evaluate(evals, windows);
}

}  // namespace hfc
