#include "nfv/state.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "nfv/error.hpp"
#include "nfv/validate.hpp"

namespace nfv {

std::shared_ptr<const Problem> Problem::make(PhysicalNetwork network, std::vector<ServiceSpec> services,
                                             Workload workload, Units units) {
  auto p = std::make_shared<Problem>();
  for (const auto& s : services) {
    auto report = validate_service(s);
    if (!report.valid) throw Error("service '" + s.id + "': " + report.problems.front());
    p->traffic.push_back(derive_traffic(s));
  }
  validate_workload(workload, services.size());
  p->network = std::move(network);
  p->services = std::move(services);
  p->workload = std::move(workload);
  p->units = units;
  return p;
}

const ServiceSpec& Problem::service_of(int request) const {
  return services.at(static_cast<std::size_t>(workload.request(request).service));
}

const TrafficProfile& Problem::traffic_of(int request) const {
  return traffic.at(static_cast<std::size_t>(workload.request(request).service));
}

const InstanceAssignment* RequestConfig::instance_on(VmId vm) const {
  for (const auto& i : instances) {
    if (i.vm == vm) return &i;
  }
  return nullptr;
}

const RequestConfig* StepState::config(int request) const {
  for (const auto& c : configs) {
    if (c.request == request) return &c;
  }
  return nullptr;
}

bool StepState::is_served(int request) const { return std::find(served.begin(), served.end(), request) != served.end(); }

DeploymentState::DeploymentState(std::shared_ptr<const Problem> problem) : problem_(std::move(problem)) {
  if (!problem_) throw Error("deployment state needs a problem");
  steps_.resize(static_cast<std::size_t>(problem_->lifespan()));
  for (auto& s : steps_) s.vms.assign(problem_->network.vm_count(), VmStep{});
}

std::vector<int> DeploymentState::admitted() const {
  std::vector<int> out;
  for (const auto& s : steps_) out.insert(out.end(), s.served.begin(), s.served.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<VmStep> vm_states_at(const PhysicalNetwork& net, const std::vector<std::vector<char>>& hosting, int t) {
  const int horizon = static_cast<int>(hosting.size());
  const auto& vms = net.vms();
  std::vector<VmStep> row(vms.size());
  for (std::size_t m = 0; m < vms.size(); ++m) {
    if (t < horizon && hosting[static_cast<std::size_t>(t)][m]) {
      row[m].active = true;
      continue;
    }
    for (int s = t + 1; s <= t + vms[m].setup_steps && s < horizon; ++s) {
      if (hosting[static_cast<std::size_t>(s)][m]) {
        row[m].turning_on = true;
        break;
      }
    }
  }
  return row;
}

void assign_vm_states(DeploymentState& state, int from, int to, const std::vector<std::vector<char>>& hosting) {
  for (int t = from; t < to; ++t) state.step(t).vms = vm_states_at(state.network(), hosting, t);
}

std::vector<std::vector<char>> hosting_table(const DeploymentState& state) {
  std::vector<std::vector<char>> h(static_cast<std::size_t>(state.steps()),
                                   std::vector<char>(state.network().vm_count(), 0));
  for (int t = 0; t < state.steps(); ++t) {
    for (const auto& c : state.step(t).configs) {
      for (const auto& i : c.instances) {
        if (i.vm != kDummyVm) h[static_cast<std::size_t>(t)][static_cast<std::size_t>(i.vm)] = 1;
      }
    }
  }
  return h;
}

namespace {

double intake(const Problem& p, const RequestConfig& c, VmId vm, int vnf) {
  const auto& tr = p.traffic_of(c.request);
  double sum = 0;
  for (const auto& r : c.routes) {
    if (r.to_vnf == vnf && r.link.dst == vm) sum += r.fraction * tr.traffic(r.from_vnf, vnf);
  }
  return sum;
}

}  // namespace

double incoming_traffic(const DeploymentState& state, int request, VmId vm, int vnf, int t) {
  const auto* c = state.step(t).config(request);
  return c ? intake(state.problem(), *c, vm, vnf) : 0.0;
}

double outgoing_traffic(const DeploymentState& state, int request, VmId vm, int vnf, int t) {
  const auto* c = state.step(t).config(request);
  if (!c) return 0.0;
  const auto& tr = state.problem().traffic_of(request);
  double sum = 0;
  for (const auto& r : c->routes) {
    if (r.from_vnf == vnf && r.link.src == vm) sum += r.fraction * tr.traffic(vnf, r.to_vnf);
  }
  return sum;
}

double processing_time(const DeploymentState& state, VmId vm, int t) {
  double margin = 0;
  bool any = false;
  for (const auto& c : state.step(t).configs) {
    for (const auto& i : c.instances) {
      if (i.vm != vm) continue;
      any = true;
      margin += i.rate - intake(state.problem(), c, vm, i.vnf);
    }
  }
  if (!any) return 0.0;
  if (!(margin > 0)) {
    throw StabilityError("VM " + std::to_string(vm) + " at step " + std::to_string(t) +
                         " is unstable: service rate does not exceed arrivals");
  }
  return 1.0 / margin;
}

double path_delay(const DeploymentState& state, int request, std::span<const int> w, std::span<const LinkRef> p,
                  int t) {
  if (p.size() != w.size() + 1) throw Error("path_delay: need one more link than VNFs");
  const auto& net = state.network();
  const auto* c = state.step(t).config(request);
  auto routed = [&](const LinkRef& l, int from, int to) {
    if (!c) return false;
    for (const auto& r : c->routes) {
      if (r.link == l && r.from_vnf == from && r.to_vnf == to && r.fraction > 1e-12) return true;
    }
    return false;
  };
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int from = i == 0 ? kDummyVnf : w[i - 1];
    const int to = i == w.size() ? kDummyVnf : w[i];
    if (routed(p[i], from, to)) d += net.logical_link(p[i]).delay;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    const VmId m = p[i].dst;
    if (c && m != kDummyVm && c->instance_on(m) && c->instance_on(m)->vnf == w[i]) d += processing_time(state, m, t);
  }
  return d;
}

double max_path_delay(const DeploymentState& state, int request, int t) {
  const auto* c = state.step(t).config(request);
  if (!c) return 0.0;
  const auto& s = state.problem().service_of(request);
  const auto& net = state.network();
  std::map<VmId, double> ptime;
  auto proc = [&](VmId m) {
    auto it = ptime.find(m);
    if (it != ptime.end()) return it->second;
    return ptime[m] = processing_time(state, m, t);
  };
  double worst = 0;
  for (const auto& w : vnf_paths(s)) {
    // worst delay from the instance of w[i-1] on `at` to the egress
    std::function<double(std::size_t, VmId)> walk = [&](std::size_t i, VmId at) -> double {
      const int from = i == 0 ? kDummyVnf : w[i - 1];
      const int to = i == w.size() ? kDummyVnf : w[i];
      double best = 0;
      for (const auto& r : c->routes) {
        if (r.from_vnf != from || r.to_vnf != to || r.link.src != at || !(r.fraction > 1e-12)) continue;
        double d = net.logical_link(r.link).delay;
        if (i < w.size()) d += proc(r.link.dst) + walk(i + 1, r.link.dst);
        best = std::max(best, d);
      }
      return best;
    };
    worst = std::max(worst, walk(0, kDummyVm));
  }
  return worst;
}

std::vector<double> link_load(const DeploymentState& state, int t) {
  const auto& net = state.network();
  std::vector<double> load(net.links().size(), 0.0);
  for (const auto& c : state.step(t).configs) {
    const auto& tr = state.problem().traffic_of(c.request);
    for (const auto& r : c.routes) {
      const auto l = net.logical_link(r.link);
      const double amount = r.fraction * tr.traffic(r.from_vnf, r.to_vnf);
      for (LinkId h : l.hops) load[static_cast<std::size_t>(h)] += amount;
    }
  }
  return load;
}

void step_forward(DeploymentState& state, std::vector<StepState> decisions, int t) {
  const int end = t + static_cast<int>(decisions.size());
  if (t < 0 || end > state.steps()) throw Error("step_forward: decisions fall outside the lifespan");
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i].vms.size() != state.network().vm_count()) throw Error("step_forward: VM state table mis-sized");
    state.step(t + static_cast<int>(i)) = std::move(decisions[i]);
  }
  auto report = validate(state, t, end);
  if (!report.feasible()) {
    throw Error("committed steps [" + std::to_string(t) + "," + std::to_string(end) + ") are infeasible:\n" +
                report.summary());
  }
}

}  // namespace nfv
