#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nfv/heuristic.hpp"
#include "nfv/state.hpp"

namespace nfv {

struct PoissonWorkload {
  double rate = 0.5;  // requests per step
  double mean_duration = 3;
  int lifespan = 10;
};

/// A complete experiment description, before multipliers are applied.
struct Scenario {
  std::string name;
  Units units;
  TopologyDescription network;
  std::vector<ServiceSpec> services;
  PoissonWorkload poisson;
  std::optional<Workload> requests;  // explicit workload; replaces the Poisson generator
  PlannerConfig planner;
  int k_paths = 3;
  double traffic_multiplier = 1;
  double delay_multiplier = 1;
  std::uint64_t seed = 1;
};

Scenario builtin_small_scale();
Scenario builtin_large_scale();

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

/// Applies the multipliers, builds the network and draws the workload for `seed`.
std::shared_ptr<const Problem> instantiate(const Scenario& s, std::uint64_t seed);

}  // namespace nfv
