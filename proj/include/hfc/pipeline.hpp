#pragma once

#include "hfc/dhf.hpp"
#include "hfc/eval.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hfc {

struct GroupData {
    std::string id;
    Hierarchy hierarchy;
    SeriesPanel panel;
    /// Precomputed base forecasts (m x H, node order); skips ARX fitting when set.
    std::optional<Matrix> base_override;
};

struct PipelineOptions {
    std::vector<Method> methods = all_methods();
    Eigen::Index train_weeks = 112;
    int horizon = 8;
    std::uint64_t seed = 42;
    DhfOptions dhf;
    int jobs = 1;
};

struct MethodFailure {
    std::string group;
    Method method = Method::bu;
    std::string message;
};

struct GroupRun {
    std::string group_id;
    Matrix actual;  // m x H, empty when the panel stops at the training window
    std::map<Method, ReconciledForecasts> forecasts;
    std::vector<MethodFailure> failures;
};

/// Runs every requested method on one group; a failing method is recorded and the rest continue.
GroupRun run_group(const GroupData& group, const PipelineOptions& options);
ReconciledForecasts run_method(Method method, const GroupData& group, const BaseForecasts& base,
                               const PipelineOptions& options);

/// Groups run concurrently on up to `options.jobs` threads; output order follows input order.
std::vector<GroupRun> run_groups(const std::vector<GroupData>& groups, const PipelineOptions& options);
std::vector<GroupRun> run_groups_ref(const std::vector<GroupData>& groups, const PipelineOptions& options);

EvalReport evaluate_runs(const std::vector<GroupRun>& runs, const std::vector<GroupData>& groups,
                         const std::vector<Window>& windows);

}  // namespace hfc
