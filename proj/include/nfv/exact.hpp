#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nfv/deploy.hpp"

namespace nfv {

struct ExactConfig {
  std::size_t max_vms = 8;
  std::size_t max_requests = 16;
  std::size_t max_vnfs = 4;
  double guard = 1e7;  // bound on enumerated placement combinations
};

/// Cheapest service rates for a chain of VMs with intakes `intake`, rate caps
/// `max_rate` and per-unit-rate prices `cost`, such that the summed processing
/// times 1/(mu - intake) stay within `budget`. Nothing when no rates fit.
std::optional<std::vector<double>> min_cost_rates(std::span<const double> intake, std::span<const double> max_rate,
                                                  std::span<const double> cost, double budget);

struct ExactResult {
  RunResult run;
  double objective = 0;
  std::size_t subsets_evaluated = 0;
};

/// Clairvoyant optimum over plans whose placements change only when a request
/// arrives or departs. Requires chains with single-instance VNFs and one-step VM setup.
ExactResult solve_exact(std::shared_ptr<const Problem> problem, const ExactConfig& config = {});

}  // namespace nfv
