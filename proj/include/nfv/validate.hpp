#pragma once

#include <array>
#include <string>
#include <vector>

#include "nfv/state.hpp"

namespace nfv {

enum class Constraint {
  lifetime,
  instance_limit,
  exclusive_hosting,
  vm_state,
  vm_setup,
  availability,
  dc_capacity,
  vm_capacity,
  routing_completeness,
  placement_consistency,
  stability,
  flow_conservation,
  latency,
  link_capacity,
};

inline constexpr std::size_t kConstraintCount = 14;

const char* constraint_name(Constraint c);
std::array<Constraint, kConstraintCount> all_constraints();

struct Violation {
  Constraint constraint;
  int t = -1;
  int request = -1;
  int vm = -1;
  int vnf = -1;
  double slack = 0;  // amount by which the constraint is exceeded
  std::string detail;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  std::size_t count(Constraint c) const;
  std::string summary(std::size_t max_lines = 10) const;
  std::string to_csv() const;
};

/// Checks steps [from, to) of the state (to < 0: through the lifespan).
FeasibilityReport validate(const DeploymentState& state, int from = 0, int to = -1);

/// Whether `excess` is a real violation of a constraint bounded by `rhs`.
bool exceeds(double excess, double rhs);

}  // namespace nfv
