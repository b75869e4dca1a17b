#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nfv/service.hpp"
#include "nfv/topology.hpp"
#include "nfv/workload.hpp"

namespace nfv {

/// Everything a planner needs to know about one experiment instance.
struct Problem {
  PhysicalNetwork network;
  std::vector<ServiceSpec> services;
  std::vector<TrafficProfile> traffic;
  Workload workload;
  Units units;

  /// Validates the services and workload and derives the traffic profiles.
  static std::shared_ptr<const Problem> make(PhysicalNetwork network, std::vector<ServiceSpec> services,
                                             Workload workload, Units units);

  int lifespan() const { return workload.lifespan; }
  const ServiceSpec& service_of(int request) const;
  const TrafficProfile& traffic_of(int request) const;
};

struct VmStep {
  bool turning_on = false;
  bool active = false;

  bool powered() const { return turning_on || active; }
};

struct InstanceAssignment {
  VmId vm = kDummyVm;
  int vnf = 0;
  double rate = 0;  // packets per ms
};

struct RouteAssignment {
  LinkRef link;
  int from_vnf = kDummyVnf;
  int to_vnf = kDummyVnf;
  double fraction = 0;
};

/// Placement, rates and routing of one request during one step.
struct RequestConfig {
  int request = -1;
  std::vector<InstanceAssignment> instances;
  std::vector<RouteAssignment> routes;

  const InstanceAssignment* instance_on(VmId vm) const;
};

struct StepState {
  std::vector<VmStep> vms;
  std::vector<RequestConfig> configs;
  std::vector<int> served;

  const RequestConfig* config(int request) const;
  bool is_served(int request) const;
};

/// Time-indexed decisions of one simulation run.
class DeploymentState {
 public:
  explicit DeploymentState(std::shared_ptr<const Problem> problem);

  const Problem& problem() const { return *problem_; }
  std::shared_ptr<const Problem> problem_ptr() const { return problem_; }
  const PhysicalNetwork& network() const { return problem_->network; }

  int steps() const { return static_cast<int>(steps_.size()); }
  StepState& step(int t) { return steps_.at(static_cast<std::size_t>(t)); }
  const StepState& step(int t) const { return steps_.at(static_cast<std::size_t>(t)); }

  bool served(int request, int t) const { return step(t).is_served(request); }
  /// Requests served at one or more steps.
  std::vector<int> admitted() const;

 private:
  std::shared_ptr<const Problem> problem_;
  std::vector<StepState> steps_;
};

/// VM states at step t given a per-step hosting table ([t][vm]): active while
/// hosting, turning on during the setup period before hosting starts.
std::vector<VmStep> vm_states_at(const PhysicalNetwork& net, const std::vector<std::vector<char>>& hosting, int t);

/// Turns a per-step hosting table ([t][vm]) into VM states: active while hosting,
/// turning on during the setup period before hosting starts, terminated otherwise.
void assign_vm_states(DeploymentState& state, int from, int to, const std::vector<std::vector<char>>& hosting);

/// Hosting table of the whole lifespan derived from the placements in `state`.
std::vector<std::vector<char>> hosting_table(const DeploymentState& state);

double incoming_traffic(const DeploymentState& state, int request, VmId vm, int vnf, int t);
double outgoing_traffic(const DeploymentState& state, int request, VmId vm, int vnf, int t);

/// Per-packet processing time of a VM; throws StabilityError when the service rate
/// does not exceed the arrival rate.
double processing_time(const DeploymentState& state, VmId vm, int t);

/// Delay along a VNF sequence `w` routed over `p` (|p| = |w| + 1, dummy links at both ends).
double path_delay(const DeploymentState& state, int request, std::span<const int> w, std::span<const LinkRef> p, int t);

/// Worst delay over every VNF path of the service and every routing path in use.
double max_path_delay(const DeploymentState& state, int request, int t);

/// Packets per ms carried by each physical link at step t.
std::vector<double> link_load(const DeploymentState& state, int t);

/// Writes committed decisions for steps [t, t + decisions.size()) and validates them.
/// Throws nfv::Error listing the violations if the committed steps are infeasible.
void step_forward(DeploymentState& state, std::vector<StepState> decisions, int t);

}  // namespace nfv
