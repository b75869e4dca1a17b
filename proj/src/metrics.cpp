#include "nfv/metrics.hpp"

#include <algorithm>

namespace nfv {

bool servable(const Problem& p, const ServiceRequest& k) {
  int setup = 1;
  if (!p.network.vms().empty()) {
    setup = std::min_element(p.network.vms().begin(), p.network.vms().end(), [](const auto& a, const auto& b) {
              return a.setup_steps < b.setup_steps;
            })->setup_steps;
  }
  return k.arrival >= setup;
}

MetricsReport compute_metrics(const DeploymentState& state) {
  const Problem& p = state.problem();
  const auto& net = p.network;
  const double gb = p.units.gb_per_rate_step();
  const double hours = p.units.hours_per_step();
  MetricsReport r;
  for (int t = 0; t < state.steps(); ++t) {
    const auto& st = state.step(t);
    for (int k : st.served) {
      const auto& s = p.service_of(k);
      r.revenue += s.revenue_rate * s.ingress_rate * gb;
      r.served_traffic += s.ingress_rate * gb;
    }
    for (const auto& c : st.configs) {
      const auto& s = p.service_of(c.request);
      const auto& tr = p.traffic_of(c.request);
      for (const auto& i : c.instances) {
        r.cpu_cost += i.rate * s.vnfs[static_cast<std::size_t>(i.vnf)].complexity * net.vm(i.vm).cpu_cost * hours;
      }
      for (const auto& rt : c.routes) {
        const double cost = net.logical_link(rt.link).tx_cost;
        if (cost > 0) r.link_cost += rt.fraction * tr.traffic(rt.from_vnf, rt.to_vnf) * cost * gb;
      }
    }
    for (std::size_t m = 0; m < st.vms.size(); ++m) {
      if (st.vms[m].powered()) r.idle_cost += net.vms()[m].idle_cost * hours;
    }
  }
  r.objective = r.revenue - r.total_cost();
  if (r.served_traffic > 0) r.cost_per_traffic = r.total_cost() / r.served_traffic;

  r.offered.assign(p.services.size(), 0);
  r.admitted.assign(p.services.size(), 0);
  const auto admitted = state.admitted();
  for (const auto& k : p.workload.requests) {
    if (!servable(p, k)) continue;
    const auto s = static_cast<std::size_t>(k.service);
    ++r.offered[s];
    if (std::binary_search(admitted.begin(), admitted.end(), k.id)) ++r.admitted[s];
  }
  for (std::size_t s = 0; s < p.services.size(); ++s) {
    r.fractions.push_back(r.offered[s] ? static_cast<double>(r.admitted[s]) / r.offered[s] : 1.0);
  }
  return r;
}

std::vector<double> admission_fractions(const DeploymentState& state) { return compute_metrics(state).fractions; }

}  // namespace nfv
