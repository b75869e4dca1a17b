#pragma once

#include <optional>
#include <vector>

#include "nfv/state.hpp"

namespace nfv {

struct MetricsReport {
  double revenue = 0;
  double link_cost = 0;
  double cpu_cost = 0;
  double idle_cost = 0;
  double objective = 0;
  double served_traffic = 0;  // Gb
  std::optional<double> cost_per_traffic;
  std::vector<double> fractions;  // per service; absent services count as 1
  std::vector<int> offered;
  std::vector<int> admitted;

  double total_cost() const { return link_cost + cpu_cost + idle_cost; }
};

/// Requests that could ever be served: no VM can be running before its setup time
/// has elapsed from the start of the lifespan.
bool servable(const Problem& p, const ServiceRequest& k);

MetricsReport compute_metrics(const DeploymentState& state);

std::vector<double> admission_fractions(const DeploymentState& state);

}  // namespace nfv
