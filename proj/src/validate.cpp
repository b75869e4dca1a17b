#include "nfv/validate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nfv/error.hpp"

namespace nfv {

const char* constraint_name(Constraint c) {
  switch (c) {
    case Constraint::lifetime: return "lifetime";
    case Constraint::instance_limit: return "instance_limit";
    case Constraint::exclusive_hosting: return "exclusive_hosting";
    case Constraint::vm_state: return "vm_state";
    case Constraint::vm_setup: return "vm_setup";
    case Constraint::availability: return "availability";
    case Constraint::dc_capacity: return "dc_capacity";
    case Constraint::vm_capacity: return "vm_capacity";
    case Constraint::routing_completeness: return "routing_completeness";
    case Constraint::placement_consistency: return "placement_consistency";
    case Constraint::stability: return "stability";
    case Constraint::flow_conservation: return "flow_conservation";
    case Constraint::latency: return "latency";
    case Constraint::link_capacity: return "link_capacity";
  }
  return "?";
}

std::array<Constraint, kConstraintCount> all_constraints() {
  std::array<Constraint, kConstraintCount> out{};
  for (std::size_t i = 0; i < kConstraintCount; ++i) out[i] = static_cast<Constraint>(i);
  return out;
}

bool exceeds(double excess, double rhs) { return excess > std::max(1e-9, 1e-6 * std::abs(rhs)); }

std::size_t FeasibilityReport::count(Constraint c) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [c](const Violation& v) { return v.constraint == c; }));
}

std::string FeasibilityReport::summary(std::size_t max_lines) const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size() && i < max_lines; ++i) {
    const auto& v = violations[i];
    out << "  " << constraint_name(v.constraint) << " t=" << v.t << " k=" << v.request << " m=" << v.vm
        << " q=" << v.vnf << " slack=" << v.slack << ": " << v.detail << "\n";
  }
  if (violations.size() > max_lines) out << "  ... " << violations.size() - max_lines << " more\n";
  return out.str();
}

std::string FeasibilityReport::to_csv() const {
  std::ostringstream out;
  out << "constraint,t,request,vm,vnf,slack,detail\n";
  for (const auto& v : violations) {
    out << constraint_name(v.constraint) << "," << v.t << "," << v.request << "," << v.vm << "," << v.vnf << ","
        << v.slack << ",\"" << v.detail << "\"\n";
  }
  return out.str();
}

namespace {

class Checker {
 public:
  Checker(const DeploymentState& s, FeasibilityReport& r) : st_(s), p_(s.problem()), net_(s.network()), out_(r) {}

  void step(int t) {
    t_ = t;
    const auto& cur = st_.step(t);
    vm_states(cur);
    lifetime(cur);
    std::vector<double> used(net_.vm_count(), 0.0);
    std::vector<int> hosted(net_.vm_count(), 0);
    for (const auto& c : cur.configs) request(cur, c, used, hosted);
    for (std::size_t m = 0; m < net_.vm_count(); ++m) {
      if (hosted[m] > 1) add(Constraint::exclusive_hosting, -1, static_cast<int>(m), -1, hosted[m] - 1, "VM hosts several VNF instances");
    }
    std::vector<double> dc(net_.datacenter_count(), 0.0);
    for (std::size_t m = 0; m < net_.vm_count(); ++m) dc[static_cast<std::size_t>(net_.vm(static_cast<VmId>(m)).datacenter)] += used[m];
    for (std::size_t d = 0; d < dc.size(); ++d) {
      const double cap = net_.datacenters()[d].capacity;
      if (exceeds(dc[d] - cap, cap)) add(Constraint::dc_capacity, -1, -1, -1, dc[d] - cap, "datacenter " + net_.datacenters()[d].name + " over capacity");
    }
    const auto load = link_load(st_, t);
    for (std::size_t e = 0; e < load.size(); ++e) {
      const double b = net_.links()[e].bandwidth;
      if (std::isfinite(b) && exceeds(load[e] - b, b)) add(Constraint::link_capacity, -1, -1, -1, load[e] - b, "physical link " + std::to_string(e) + " overloaded");
    }
  }

 private:
  void add(Constraint c, int k, int m, int q, double slack, std::string detail) {
    out_.violations.push_back(Violation{c, t_, k, m, q, slack, std::move(detail)});
  }

  void vm_states(const StepState& cur) {
    if (cur.vms.size() != net_.vm_count()) {
      add(Constraint::vm_state, -1, -1, -1, 1, "VM state table mis-sized");
      return;
    }
    for (std::size_t m = 0; m < cur.vms.size(); ++m) {
      const auto& v = cur.vms[m];
      const int vm = static_cast<int>(m);
      if (v.turning_on && v.active) add(Constraint::vm_state, -1, vm, -1, 1, "VM both turning on and active");
      if (!v.active) continue;
      if (t_ == 0) {
        add(Constraint::vm_setup, -1, vm, -1, 1, "VM active without being turned on");
        continue;
      }
      if (st_.step(t_ - 1).vms[m].active) continue;
      int run = 0;
      int s = t_ - 1;
      while (s >= 0 && st_.step(s).vms[m].turning_on && !st_.step(s).vms[m].active) {
        ++run;
        --s;
      }
      const bool after_active = run > 0 && s >= 0 && st_.step(s).vms[m].active;
      if (run < net_.vm(vm).setup_steps && !after_active) {
        add(Constraint::vm_setup, -1, vm, -1, net_.vm(vm).setup_steps - run, "VM active after too short a setup");
      }
    }
  }

  void lifetime(const StepState& cur) {
    std::map<int, int> seen;
    for (int k : cur.served) {
      if (++seen[k] > 1) {
        add(Constraint::lifetime, k, -1, -1, 1, "request listed twice");
        continue;
      }
      const auto& r = p_.workload.request(k);
      if (!r.active_at(t_)) {
        add(Constraint::lifetime, k, -1, -1, 1, "served outside its lifetime");
        continue;
      }
      if (t_ > r.arrival && !st_.served(k, t_ - 1)) add(Constraint::lifetime, k, -1, -1, 1, "service starts after arrival");
    }
    if (t_ == 0) return;
    for (int k : st_.step(t_ - 1).served) {
      const auto& r = p_.workload.request(k);
      if (t_ < r.departure && !cur.is_served(k)) add(Constraint::lifetime, k, -1, -1, 1, "service interrupted before departure");
    }
  }

  void request(const StepState& cur, const RequestConfig& c, std::vector<double>& used, std::vector<int>& hosted) {
    const int k = c.request;
    if (!cur.is_served(k)) {
      add(Constraint::placement_consistency, k, -1, -1, 1, "deployment of a request that is not served");
    }
    if (std::count_if(cur.configs.begin(), cur.configs.end(), [k](const RequestConfig& o) { return o.request == k; }) > 1) {
      add(Constraint::placement_consistency, k, -1, -1, 1, "request deployed twice");
    }
    const auto& s = p_.service_of(k);
    const auto& tr = p_.traffic_of(k);
    const int nq = static_cast<int>(s.size());

    std::vector<int> count(s.size(), 0);
    bool placement_ok = true;
    for (const auto& i : c.instances) {
      if (i.vm < 0 || static_cast<std::size_t>(i.vm) >= net_.vm_count() || i.vnf < 0 || i.vnf >= nq) {
        add(Constraint::placement_consistency, k, i.vm, i.vnf, 1, "instance on an unknown VM or VNF");
        placement_ok = false;
        continue;
      }
      const auto m = static_cast<std::size_t>(i.vm);
      ++count[static_cast<std::size_t>(i.vnf)];
      ++hosted[m];
      if (!cur.vms[m].active) add(Constraint::availability, k, i.vm, i.vnf, 1, "instance on a VM that is not active");
      const double cpu = i.rate * s.vnfs[static_cast<std::size_t>(i.vnf)].complexity;
      const double cap = net_.vm(i.vm).capacity;
      if (exceeds(cpu - cap, cap)) add(Constraint::vm_capacity, k, i.vm, i.vnf, cpu - cap, "service rate exceeds VM capacity");
      if (i.rate < 0) add(Constraint::vm_capacity, k, i.vm, i.vnf, -i.rate, "negative service rate");
      used[m] += std::max(0.0, cpu);
    }
    for (int q = 0; q < nq; ++q) {
      const int limit = s.vnfs[static_cast<std::size_t>(q)].max_instances;
      if (count[static_cast<std::size_t>(q)] > limit) add(Constraint::instance_limit, k, -1, q, count[static_cast<std::size_t>(q)] - limit, "too many instances");
    }

    // routing sums per VNF edge, including the dummy ends
    std::map<std::pair<int, int>, double> sums;
    for (const auto& r : c.routes) {
      const bool known_vnfs = r.from_vnf >= kDummyVnf && r.from_vnf < nq && r.to_vnf >= kDummyVnf && r.to_vnf < nq &&
                              !(r.from_vnf == kDummyVnf && r.to_vnf == kDummyVnf);
      if (!known_vnfs || !net_.contains(r.link)) {
        add(Constraint::placement_consistency, k, r.link.src, r.to_vnf, 1, "route over an unknown VNF edge or logical link");
        placement_ok = false;
        continue;
      }
      if (r.fraction < 0 || exceeds(r.fraction - 1.0, 1.0)) {
        add(Constraint::routing_completeness, k, r.link.src, r.to_vnf, r.fraction < 0 ? -r.fraction : r.fraction - 1, "routing fraction outside [0,1]");
      }
      if (!(r.fraction > 1e-12)) continue;
      sums[{r.from_vnf, r.to_vnf}] += r.fraction;
      if (!endpoint_hosts(c, r.link.src, r.from_vnf)) {
        add(Constraint::placement_consistency, k, r.link.src, r.from_vnf, r.fraction, "traffic leaves a VM not hosting its VNF");
        placement_ok = false;
      }
      if (!endpoint_hosts(c, r.link.dst, r.to_vnf)) {
        add(Constraint::placement_consistency, k, r.link.dst, r.to_vnf, r.fraction, "traffic enters a VM not hosting its VNF");
        placement_ok = false;
      }
    }
    if (cur.is_served(k)) {
      for (int a = kDummyVnf; a < nq; ++a) {
        for (int b = kDummyVnf; b < nq; ++b) {
          if (a == b || !(s.prob(a, b) > 0)) continue;
          const double sum = sums.count({a, b}) ? sums[{a, b}] : 0.0;
          if (1.0 - sum > 1e-6) add(Constraint::routing_completeness, k, -1, b, 1.0 - sum, "VNF edge traffic not fully routed");
          if (sum - 1.0 > 1e-6) add(Constraint::routing_completeness, k, -1, b, sum - 1.0, "VNF edge traffic routed more than once");
        }
      }
    }
    if (!placement_ok) return;

    bool stable = true;
    for (const auto& i : c.instances) {
      const double in = incoming_traffic(st_, k, i.vm, i.vnf, t_);
      const double out = outgoing_traffic(st_, k, i.vm, i.vnf, t_);
      if (!(i.rate - in > 1e-12)) {
        add(Constraint::stability, k, i.vm, i.vnf, in - i.rate, "service rate does not exceed incoming traffic");
        stable = false;
      }
      const double expect = tr.scaling[static_cast<std::size_t>(i.vnf)] * in;
      if (exceeds(std::abs(out - expect), expect)) add(Constraint::flow_conservation, k, i.vm, i.vnf, out - expect, "outgoing traffic differs from scaled incoming traffic");
    }
    if (stable && cur.is_served(k)) {
      try {
        const double d = max_path_delay(st_, k, t_);
        if (exceeds(d - s.target_delay, s.target_delay)) add(Constraint::latency, k, -1, -1, d - s.target_delay, "end-to-end delay above target");
      } catch (const StabilityError& e) {
        add(Constraint::stability, k, -1, -1, 0, e.what());
      }
    }
  }

  bool endpoint_hosts(const RequestConfig& c, VmId vm, int vnf) const {
    if (vnf == kDummyVnf) return vm == kDummyVm;
    const auto* i = c.instance_on(vm);
    return i && i->vnf == vnf;
  }

  const DeploymentState& st_;
  const Problem& p_;
  const PhysicalNetwork& net_;
  FeasibilityReport& out_;
  int t_ = 0;
};

}  // namespace

FeasibilityReport validate(const DeploymentState& state, int from, int to) {
  if (to < 0) to = state.steps();
  FeasibilityReport r;
  Checker check(state, r);
  for (int t = std::max(0, from); t < std::min(to, state.steps()); ++t) check.step(t);
  return r;
}

}  // namespace nfv
