#pragma once

#include <memory>
#include <random>

#include "nfv/error.hpp"
#include "nfv/state.hpp"
#include "nfv/validate.hpp"

namespace fixtures {

using namespace nfv;

struct Params {
  double rate = 0.5;     // ingress packets per ms
  double service = 1.0;  // base service rate of both VNFs
  double target = 20;
};

// Datacenter X holds VMs a, b, c (capacity 600 each, 1000 in total) behind
// gateway switch gx; datacenter Y holds VM d, reached from gx over a link of
// bandwidth 0.4 pkt/ms. Request 0 lives over [2, 5) on a -> b; request 1 over
// [3, 4) is rejected in the base state.
inline std::shared_ptr<const Problem> mutation_problem(const Params& prm) {
  TopologyDescription d;
  d.switches = {"gx"};
  d.datacenters = {{"X", 1000, "gx"}, {"Y", 600, ""}};
  d.vms = {{"a", "X", 600, 2e-5, 0.018, 1}, {"b", "X", 600, 2e-5, 0.018, 1}, {"c", "X", 600, 2e-5, 0.018, 1},
           {"d", "Y", 600, 2e-5, 0.018, 1}};
  d.links = {{"gx", "d", 0.4, 2, 0.02, true}};
  auto s = ServiceSpec::chain("s", {{"f1", 1, 1}, {"f2", 1, 2}}, prm.rate, prm.target, 100);
  Workload w;
  w.lifespan = 6;
  w.requests = {{0, 0, 2, 5}, {1, 0, 3, 4}};
  Units u;
  return Problem::make(PhysicalNetwork::build(d), {s}, w, u);
}

inline RequestConfig chain_config(const PhysicalNetwork& net, int k, VmId first, VmId second, double mu1, double mu2) {
  RequestConfig c;
  c.request = k;
  c.instances = {{first, 0, mu1}, {second, 1, mu2}};
  c.routes = {{{kDummyVm, first, 0}, kDummyVnf, 0, 1.0},
              {net.links_between(first, second).front().ref, 0, 1, 1.0},
              {{second, kDummyVm, 0}, 1, kDummyVnf, 1.0}};
  return c;
}

// Every VM turns on at step 1 and stays active over [2, 5).
inline DeploymentState base_state(std::shared_ptr<const Problem> p, const Params& prm) {
  DeploymentState st(p);
  const auto& net = p->network;
  for (int t = 0; t < st.steps(); ++t) {
    auto& s = st.step(t);
    s.vms.assign(net.vm_count(), VmStep{});
    for (auto& v : s.vms) {
      v.turning_on = t == 1;
      v.active = t >= 2 && t < 5;
    }
    if (t >= 2 && t < 5) {
      s.configs.push_back(chain_config(net, 0, net.find_vm("a"), net.find_vm("b"), prm.service, prm.service));
      s.served.push_back(0);
    }
  }
  return st;
}

inline RequestConfig& config0(DeploymentState& st, int t) {
  for (auto& c : st.step(t).configs) {
    if (c.request == 0) return c;
  }
  throw Error("request 0 not deployed");
}

inline void mutate(DeploymentState& st, Constraint c, const Params& prm) {
  const auto& net = st.network();
  const VmId a = net.find_vm("a"), b = net.find_vm("b"), cc = net.find_vm("c"), d = net.find_vm("d");
  auto& s3 = st.step(3);
  switch (c) {
    case Constraint::lifetime:
      s3.configs.clear();
      s3.served.clear();
      break;
    case Constraint::instance_limit: {
      auto& k = config0(st, 3);
      k.instances.push_back({cc, 0, prm.service});
      k.routes = {{{kDummyVm, a, 0}, kDummyVnf, 0, 0.5},
                  {{kDummyVm, cc, 0}, kDummyVnf, 0, 0.5},
                  {net.links_between(a, b).front().ref, 0, 1, 0.5},
                  {net.links_between(cc, b).front().ref, 0, 1, 0.5},
                  {{b, kDummyVm, 0}, 1, kDummyVnf, 1.0}};
      break;
    }
    case Constraint::exclusive_hosting:
      s3.configs.push_back(chain_config(net, 1, a, cc, prm.service, prm.service));
      s3.served.push_back(1);
      break;
    case Constraint::vm_state:
      s3.vms[static_cast<std::size_t>(cc)].turning_on = true;
      break;
    case Constraint::vm_setup:
      st.step(1).vms[static_cast<std::size_t>(a)].turning_on = false;
      break;
    case Constraint::availability:
      st.step(4).vms[static_cast<std::size_t>(b)].active = false;
      break;
    case Constraint::dc_capacity:
      config0(st, 3).instances[0].rate = 550;
      config0(st, 3).instances[1].rate = 550;
      break;
    case Constraint::vm_capacity:
      config0(st, 3).instances[0].rate = 700;
      break;
    case Constraint::routing_completeness:
      for (auto& r : config0(st, 3).routes) r.fraction = 0.5;
      break;
    case Constraint::placement_consistency: {
      RequestConfig ghost;
      ghost.request = 1;
      s3.configs.push_back(ghost);
      break;
    }
    case Constraint::stability:
      config0(st, 3).instances[0].rate = prm.rate;
      break;
    case Constraint::flow_conservation: {
      auto& k = config0(st, 3);
      k.instances.push_back({cc, 1, prm.service});
      k.routes.back().fraction = 0.5;
      k.routes.push_back({{cc, kDummyVm, 0}, 1, kDummyVnf, 0.5});
      break;
    }
    case Constraint::latency:
      // processing time alone exceeds the target
      config0(st, 3).instances[0].rate = prm.rate + 1.0 / (prm.target + 1);
      break;
    case Constraint::link_capacity:
      s3.configs.push_back(chain_config(net, 1, cc, d, prm.service, prm.service));
      s3.served.push_back(1);
      break;
  }
}

inline Params random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Params p;
  p.rate = 0.41 + 0.5 * u(rng);  // above the inter-datacenter bandwidth
  p.service = p.rate + 0.5 + u(rng);
  p.target = 10 + 20 * u(rng);
  return p;
}

}  // namespace fixtures
