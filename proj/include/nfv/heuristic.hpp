#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "nfv/deploy.hpp"

namespace nfv {

struct PlannerConfig {
  int horizon = 4;  // steps looked ahead at each execution
  int period = 1;   // steps committed before re-planning
};

/// Decisions for one window [begin, end).
struct WindowPlan {
  int begin = 0;
  int end = 0;
  std::vector<PlanResult> results;    // in processing order
  std::vector<std::pair<int, int>> spans;  // served interval of each admitted result
  std::vector<bool> continuing;
  std::vector<bool> fell_back;

  /// Per-step decisions for steps [from, to) of the window, VM states excluded.
  std::vector<StepState> steps(int from, int to, std::size_t vm_count) const;
};

/// VM readiness: the earliest step in [t, t + setup] at which a VM can start hosting,
/// given the VM states committed before t.
int ready_step(const DeploymentState& state, VmId vm, int t);

/// One execution of the planner at step t over [t, t + H). Requests admitted by
/// `previous` that have not started yet are never dropped.
WindowPlan plan_horizon(const DeploymentState& state, int t, const PlannerConfig& config,
                        const WindowPlan* previous = nullptr);

RunResult run_heuristic(std::shared_ptr<const Problem> problem, const PlannerConfig& config, std::ostream* log = nullptr);

}  // namespace nfv
