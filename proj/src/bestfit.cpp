#include "nfv/bestfit.hpp"

#include <algorithm>
#include <ostream>

namespace nfv {

DeployOptions bestfit_options() {
  DeployOptions o;
  o.largest = false;
  o.instance_cap = 1;
  o.allow_backtrack = false;
  o.allow_compensation = false;
  o.use_cache = false;
  return o;
}

RunResult run_bestfit(std::shared_ptr<const Problem> problem, std::ostream* log) {
  const Problem& p = *problem;
  const auto& net = p.network;
  const int T = p.lifespan();
  RunResult run{DeploymentState(problem), {}};

  // VMs are switched on just ahead of the arrival that needs them, so any VM can
  // host from its setup time onwards
  Ledger ledger(net, 0, T);
  for (std::size_t m = 0; m < net.vm_count(); ++m) ledger.set_ready_from(static_cast<VmId>(m), net.vms()[m].setup_steps);

  std::vector<const ServiceRequest*> order;
  for (const auto& k : p.workload.requests) order.push_back(&k);
  std::stable_sort(order.begin(), order.end(), [](const ServiceRequest* a, const ServiceRequest* b) {
    return a->arrival != b->arrival ? a->arrival < b->arrival : a->id < b->id;
  });

  Deployer deployer(p, ledger, bestfit_options());
  std::vector<StepState> steps(static_cast<std::size_t>(T));
  auto hosting = std::vector<std::vector<char>>(static_cast<std::size_t>(T), std::vector<char>(net.vm_count(), 0));
  for (const auto* k : order) {
    auto r = deployer.bsrd(k->id, k->arrival, k->departure);
    if (r.admitted) {
      ledger.reserve(p, r.config, k->arrival, k->departure);
      for (int t = k->arrival; t < k->departure; ++t) {
        auto& s = steps[static_cast<std::size_t>(t)];
        s.configs.push_back(r.config);
        s.served.push_back(k->id);
        for (const auto& i : r.config.instances) hosting[static_cast<std::size_t>(t)][static_cast<std::size_t>(i.vm)] = 1;
      }
    }
    if (log) *log << "arrival t=" << k->arrival << " k" << k->id << ":" << (r.admitted ? "ok" : reason_name(r.reason)) << "\n";
    run.decisions.push_back(std::move(r));
  }
  for (int t = 0; t < T; ++t) {
    auto& s = steps[static_cast<std::size_t>(t)];
    std::sort(s.served.begin(), s.served.end());
    s.vms = vm_states_at(net, hosting, t);
  }
  step_forward(run.state, std::move(steps), 0);
  std::sort(run.decisions.begin(), run.decisions.end(), [](const PlanResult& a, const PlanResult& b) { return a.request < b.request; });
  return run;
}

}  // namespace nfv
