#pragma once

#include <map>
#include <string>
#include <vector>

#include "nfv/ledger.hpp"
#include "nfv/state.hpp"

namespace nfv {

enum class Strategy { cheapest, largest };
enum class Mode { normal, critical };
enum class Reason { none, traffic, delay, structure };

const char* reason_name(Reason r);

struct DeployOptions {
  bool cheapest = true;
  bool largest = true;
  int instance_cap = 0;  // 0: only the service's own limit applies
  bool allow_backtrack = true;
  bool allow_compensation = true;
  bool use_cache = true;
};

/// Traffic moved over one logical link between two VNF instances.
struct Flow {
  LinkRef link;
  double amount = 0;  // packets per ms
};

struct PlacedInstance {
  VmId vm = kDummyVm;
  double rate = 0;
  double intake = 0;
  double delay_before = 0;  // worst delay of packets reaching the VM
  double delay_after = 0;   // worst delay once processed
};

/// Placement, rates and incoming routing of one VNF of the chain.
struct VnfDeployment {
  int vnf = 0;
  std::vector<Flow> flows;
  std::vector<PlacedInstance> instances;

  const PlacedInstance* on(VmId vm) const;
};

struct CacheEntry {
  VmId vm = kDummyVm;
  int vnf = 0;
  double amount = 0;  // outgoing traffic the instance managed to forward
};

/// Working state of one BSRD run.
struct PlanContext {
  int request = -1;
  int begin = 0;
  int end = 0;
  std::vector<int> chain;
  std::vector<double> cumulative_budget;
  std::vector<VnfDeployment> deployed;
  std::vector<CacheEntry> cache;
  Mode status = Mode::normal;
  bool can_backtrack = false;
  std::map<LinkId, double> own_link_use;
};

struct VptrResult {
  Reason fail = Reason::none;
  VnfDeployment deployment;
};

struct PlanResult {
  int request = -1;
  bool admitted = false;
  Reason reason = Reason::none;
  RequestConfig config;
  int rounds = 0;
  int backtracks = 0;
  int max_instances = 0;
};

/// Outcome of a whole simulation run.
struct RunResult {
  DeploymentState state;
  std::vector<PlanResult> decisions;  // final decision per request considered
};

/// The per-request deployment procedure shared by the sliding-horizon planner and
/// the best-fit baseline. Reads reservations from a ledger but never writes them.
class Deployer {
 public:
  Deployer(const Problem& problem, const Ledger& ledger, DeployOptions options = {});

  PlanResult bsrd(int request, int begin, int end);

  /// Fresh context; also forgets cached link residuals since the ledger may have changed.
  PlanContext start(int request, int begin, int end);
  VptrResult vptr(PlanContext& ctx, std::size_t i, int n, Strategy strategy);
  /// Assigns service rates in place; false when a delay budget is exceeded.
  bool ca(const PlanContext& ctx, std::size_t i, VnfDeployment& dep, Mode mode) const;

 private:
  struct Candidate {
    LinkRef link;
    double cost = 0;
    double room = 0;
  };

  double phys_residual(const PlanContext& ctx, LinkId e);
  double link_room(const PlanContext& ctx, const LogicalLink& l, const std::map<LinkId, double>& pending);
  bool used_by(const PlanContext& ctx, VmId vm) const;
  void push(PlanContext& ctx, VnfDeployment dep) const;
  void pop(PlanContext& ctx) const;
  int instance_limit(int vnf, const ServiceSpec& s) const;
  RequestConfig assemble(const PlanContext& ctx) const;

  const Problem& p_;
  const Ledger& ledger_;
  DeployOptions opt_;
  std::vector<std::vector<std::vector<VmId>>> classes_;  // [dc][class] -> VMs by id
  std::vector<double> residual_memo_;
};

}  // namespace nfv
