#include "nfv/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "nfv/error.hpp"
#include "nfv/metrics.hpp"

namespace nfv {

std::optional<std::vector<double>> min_cost_rates(std::span<const double> intake, std::span<const double> max_rate,
                                                  std::span<const double> cost, double budget) {
  const std::size_t n = intake.size();
  if (max_rate.size() != n || cost.size() != n) throw Error("min_cost_rates: mismatched inputs");
  if (!(budget > 0)) return std::nullopt;
  std::vector<double> room(n);
  for (std::size_t i = 0; i < n; ++i) {
    room[i] = max_rate[i] - intake[i];
    if (!(room[i] > 0)) return std::nullopt;
  }
  // x_i = mu_i - I_i; minimise sum a_i x_i with sum 1/x_i <= B and x_i <= room_i
  std::vector<double> x(n, 0.0);
  std::vector<bool> clamped(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cost[i] > 0)) {
      clamped[i] = true;
      x[i] = room[i];
    }
  }
  for (;;) {
    double left = budget;
    double roots = 0;
    bool any_free = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (clamped[i]) {
        left -= 1.0 / x[i];
      } else {
        roots += std::sqrt(cost[i]);
        any_free = true;
      }
    }
    if (!any_free) {
      if (left < -std::max(1e-12, 1e-9 * budget)) return std::nullopt;
      break;
    }
    if (!(left > 0)) return std::nullopt;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (clamped[i]) continue;
      x[i] = roots / (left * std::sqrt(cost[i]));
      if (x[i] > room[i]) {
        x[i] = room[i];
        clamped[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = intake[i] + x[i];
  return mu;
}

namespace {

struct Option {
  std::vector<VmId> vms;
  std::vector<double> rates;
  std::vector<LinkRef> links;  // ingress, inner edges, then egress links in chain order
  unsigned mask = 0;
  double step_cost = 0;
  std::map<DcId, double> dc_cpu;
  std::map<LinkId, double> load;
};

std::vector<Option> service_options(const Problem& p, std::size_t service) {
  const auto& net = p.network;
  const auto& s = p.services[service];
  const auto& tr = p.traffic[service];
  const auto chain = *chain_order(s);
  const double gb = p.units.gb_per_rate_step();
  const double hours = p.units.hours_per_step();
  std::vector<Option> out;

  std::vector<VmId> seq;
  std::function<void()> place = [&]() {
    if (seq.size() == chain.size()) {
      std::vector<std::vector<LogicalLink>> choices;
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) choices.push_back(net.links_between(seq[i], seq[i + 1]));
      std::vector<std::size_t> pick(choices.size(), 0);
      for (;;) {
        bool empty = false;
        for (const auto& c : choices) empty = empty || c.empty();
        if (empty) return;
        Option o;
        o.vms = seq;
        double net_delay = 0;
        std::vector<double> intake, cap, price;
        o.links.push_back(LinkRef{kDummyVm, seq[0], 0});
        for (std::size_t i = 0; i < chain.size(); ++i) {
          const auto q = static_cast<std::size_t>(chain[i]);
          const auto& v = net.vm(seq[i]);
          intake.push_back(tr.vnf_rates[q]);
          cap.push_back(v.capacity / s.vnfs[q].complexity);
          price.push_back(v.cpu_cost * s.vnfs[q].complexity * hours);
          o.mask |= 1u << seq[i];
          if (i + 1 < chain.size()) {
            const auto& l = choices[i][pick[i]];
            o.links.push_back(l.ref);
            net_delay += l.delay;
            const double amount = tr.traffic(chain[i], chain[i + 1]);
            o.step_cost += amount * l.tx_cost * gb;
            for (LinkId e : l.hops) o.load[e] += amount;
          }
        }
        for (std::size_t i = 0; i < chain.size(); ++i) {
          if (s.prob(chain[i], kDummyVnf) > 0) o.links.push_back(LinkRef{seq[i], kDummyVm, 0});
        }
        if (auto mu = min_cost_rates(intake, cap, price, s.target_delay - net_delay)) {
          o.rates = *mu;
          for (std::size_t i = 0; i < chain.size(); ++i) {
            o.step_cost += price[i] * o.rates[i];
            o.dc_cpu[net.vm(seq[i]).datacenter] += o.rates[i] * s.vnfs[static_cast<std::size_t>(chain[i])].complexity;
          }
          out.push_back(std::move(o));
        }
        std::size_t d = 0;
        while (d < pick.size() && ++pick[d] == choices[d].size()) pick[d++] = 0;
        if (d == pick.size()) return;
      }
    }
    for (std::size_t m = 0; m < net.vm_count(); ++m) {
      const auto vm = static_cast<VmId>(m);
      if (std::find(seq.begin(), seq.end(), vm) != seq.end()) continue;
      seq.push_back(vm);
      place();
      seq.pop_back();
    }
  };
  place();
  return out;
}

RequestConfig to_config(const Problem& p, int request, const Option& o) {
  const auto& s = p.service_of(request);
  const auto chain = *chain_order(s);
  RequestConfig c;
  c.request = request;
  for (std::size_t i = 0; i < chain.size(); ++i) c.instances.push_back(InstanceAssignment{o.vms[i], chain[i], o.rates[i]});
  c.routes.push_back(RouteAssignment{o.links[0], kDummyVnf, chain[0], 1.0});
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) c.routes.push_back(RouteAssignment{o.links[i + 1], chain[i], chain[i + 1], 1.0});
  std::size_t next = chain.size();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (s.prob(chain[i], kDummyVnf) > 0) c.routes.push_back(RouteAssignment{o.links[next++], chain[i], kDummyVnf, 1.0});
  }
  return c;
}

struct Epoch {
  int begin = 0;
  int end = 0;
  std::vector<std::size_t> active;  // indices into the candidate request list
};

struct Plan {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> choice;  // per epoch, option index per active request
};

class Solver {
 public:
  Solver(const Problem& p, const ExactConfig& cfg) : p_(p), cfg_(cfg) {
    for (std::size_t s = 0; s < p.services.size(); ++s) options_.push_back(service_options(p, s));
  }

  const std::vector<Option>& options_of(int request) const {
    return options_[static_cast<std::size_t>(p_.workload.request(request).service)];
  }

  // cheapest plan serving exactly `members`
  Plan solve(const std::vector<const ServiceRequest*>& members) {
    std::vector<int> cuts;
    for (const auto* k : members) {
      cuts.push_back(k->arrival);
      cuts.push_back(k->departure);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Epoch> epochs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      Epoch e{cuts[i], cuts[i + 1], {}};
      for (std::size_t j = 0; j < members.size(); ++j) {
        if (members[j]->arrival <= e.begin && e.end <= members[j]->departure) e.active.push_back(j);
      }
      epochs.push_back(std::move(e));
    }

    const auto& net = p_.network;
    const double hours = p_.units.hours_per_step();
    std::map<unsigned, double> value{{0u, 0.0}};
    std::vector<std::map<unsigned, std::pair<unsigned, std::vector<std::size_t>>>> back;
    for (const auto& e : epochs) {
      const int len = e.end - e.begin;
      std::map<unsigned, std::pair<double, std::vector<std::size_t>>> best;
      std::vector<std::size_t> pick;
      std::map<DcId, double> dc;
      std::map<LinkId, double> load;
      std::function<void(std::size_t, unsigned, double)> dfs = [&](std::size_t j, unsigned mask, double cost) {
        if (++work_ > cfg_.guard) throw Error("exact search exceeds its enumeration guard");
        if (j == e.active.size()) {
          double idle = 0;
          for (std::size_t m = 0; m < net.vm_count(); ++m) {
            if (mask & (1u << m)) idle += net.vms()[m].idle_cost * hours;
          }
          const double total = (cost + idle) * len;
          auto it = best.find(mask);
          if (it == best.end() || total < it->second.first) best[mask] = {total, pick};
          return;
        }
        const auto& opts = options_of(members[e.active[j]]->id);
        for (std::size_t o = 0; o < opts.size(); ++o) {
          const auto& opt = opts[o];
          if (opt.mask & mask) continue;
          bool fits = true;
          for (const auto& [d, cpu] : opt.dc_cpu) {
            const double cap = net.datacenters()[static_cast<std::size_t>(d)].capacity;
            fits = fits && dc[d] + cpu <= cap * (1 + 1e-9);
          }
          for (const auto& [l, amount] : opt.load) fits = fits && load[l] + amount <= net.link(l).bandwidth * (1 + 1e-9);
          if (!fits) continue;
          for (const auto& [d, cpu] : opt.dc_cpu) dc[d] += cpu;
          for (const auto& [l, amount] : opt.load) load[l] += amount;
          pick.push_back(o);
          dfs(j + 1, mask | opt.mask, cost + opt.step_cost);
          pick.pop_back();
          for (const auto& [d, cpu] : opt.dc_cpu) dc[d] -= cpu;
          for (const auto& [l, amount] : opt.load) load[l] -= amount;
        }
      };
      dfs(0, 0u, 0.0);
      if (best.empty()) return Plan{};

      std::map<unsigned, double> next;
      std::map<unsigned, std::pair<unsigned, std::vector<std::size_t>>> from;
      for (const auto& [mask, entry] : best) {
        for (const auto& [prev, v] : value) {
          double wake = 0;
          for (std::size_t m = 0; m < net.vm_count(); ++m) {
            if ((mask & ~prev) & (1u << m)) wake += net.vms()[m].idle_cost * hours;
          }
          const double c = v + wake + entry.first;
          auto it = next.find(mask);
          if (it == next.end() || c < it->second) {
            next[mask] = c;
            from[mask] = {prev, entry.second};
          }
        }
      }
      value = std::move(next);
      back.push_back(std::move(from));
    }

    Plan plan;
    unsigned mask = 0;
    for (const auto& [m, v] : value) {
      if (v < plan.cost) {
        plan.cost = v;
        mask = m;
      }
    }
    plan.choice.resize(epochs.size());
    for (std::size_t i = epochs.size(); i-- > 0;) {
      const auto& [prev, pick] = back[i].at(mask);
      plan.choice[i] = pick;
      mask = prev;
    }
    epochs_ = std::move(epochs);
    return plan;
  }

  const std::vector<Epoch>& epochs() const { return epochs_; }

 private:
  const Problem& p_;
  const ExactConfig& cfg_;
  std::vector<std::vector<Option>> options_;
  std::vector<Epoch> epochs_;
  double work_ = 0;
};

}  // namespace

ExactResult solve_exact(std::shared_ptr<const Problem> problem, const ExactConfig& config) {
  const Problem& p = *problem;
  const auto& net = p.network;
  if (net.vm_count() > config.max_vms) throw Error("exact solver: too many VMs (" + std::to_string(net.vm_count()) + ")");
  for (const auto& vm : net.vms()) {
    if (vm.setup_steps != 1) throw Error("exact solver: VM setup must take exactly one step");
  }
  for (const auto& s : p.services) {
    if (!chain_order(s)) throw Error("exact solver: service '" + s.id + "' is not a chain");
    if (s.size() > config.max_vnfs) throw Error("exact solver: service '" + s.id + "' has too many VNFs");
    for (const auto& v : s.vnfs) {
      if (v.max_instances != 1) throw Error("exact solver: VNFs must be single-instance");
    }
  }

  Solver solver(p, config);
  std::vector<const ServiceRequest*> cands;
  for (const auto& k : p.workload.requests) {
    if (k.arrival >= 1 && !solver.options_of(k.id).empty()) cands.push_back(&k);
  }
  if (cands.size() > config.max_requests) throw Error("exact solver: too many requests (" + std::to_string(cands.size()) + ")");

  const double gb = p.units.gb_per_rate_step();
  std::vector<double> rev;
  for (const auto* k : cands) {
    const auto& s = p.services[static_cast<std::size_t>(k->service)];
    rev.push_back(s.revenue_rate * s.ingress_rate * gb * k->duration());
  }
  const std::size_t count = std::size_t{1} << cands.size();
  std::vector<std::pair<double, std::size_t>> subsets;
  subsets.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    double r = 0;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (mask & (std::size_t{1} << j)) r += rev[j];
    }
    subsets.emplace_back(r, mask);
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  ExactResult result{RunResult{DeploymentState(problem), {}}, 0.0, 0};
  double best = 0;
  std::size_t best_mask = 0;
  Plan best_plan;
  std::vector<Epoch> best_epochs;
  std::vector<std::size_t> infeasible;
  for (const auto& [revenue, mask] : subsets) {
    if (revenue <= best + 1e-12) break;
    bool doomed = false;
    for (std::size_t bad : infeasible) doomed = doomed || (mask & bad) == bad;
    if (doomed) continue;
    std::vector<const ServiceRequest*> members;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (mask & (std::size_t{1} << j)) members.push_back(cands[j]);
    }
    ++result.subsets_evaluated;
    auto plan = solver.solve(members);
    if (!std::isfinite(plan.cost)) {
      infeasible.push_back(mask);
      continue;
    }
    if (revenue - plan.cost > best + 1e-12) {
      best = revenue - plan.cost;
      best_mask = mask;
      best_plan = std::move(plan);
      best_epochs = solver.epochs();
    }
  }

  const int T = p.lifespan();
  std::vector<StepState> steps(static_cast<std::size_t>(T));
  std::vector<std::vector<char>> hosting(static_cast<std::size_t>(T), std::vector<char>(net.vm_count(), 0));
  std::vector<const ServiceRequest*> members;
  for (std::size_t j = 0; j < cands.size(); ++j) {
    if (best_mask & (std::size_t{1} << j)) members.push_back(cands[j]);
  }
  for (std::size_t e = 0; e < best_epochs.size(); ++e) {
    const auto& ep = best_epochs[e];
    for (std::size_t a = 0; a < ep.active.size(); ++a) {
      const auto* k = members[ep.active[a]];
      const auto& opt = solver.options_of(k->id)[best_plan.choice[e][a]];
      const auto config = to_config(p, k->id, opt);
      for (int t = ep.begin; t < ep.end; ++t) {
        steps[static_cast<std::size_t>(t)].configs.push_back(config);
        steps[static_cast<std::size_t>(t)].served.push_back(k->id);
        for (VmId m : opt.vms) hosting[static_cast<std::size_t>(t)][static_cast<std::size_t>(m)] = 1;
      }
    }
  }
  for (int t = 0; t < T; ++t) {
    auto& s = steps[static_cast<std::size_t>(t)];
    std::sort(s.served.begin(), s.served.end());
    s.vms = vm_states_at(net, hosting, t);
  }
  step_forward(result.run.state, std::move(steps), 0);
  for (const auto& k : p.workload.requests) {
    PlanResult r;
    r.request = k.id;
    r.admitted = std::find(members.begin(), members.end(), &k) != members.end();
    r.reason = r.admitted ? Reason::none : Reason::traffic;
    if (r.admitted) r.config = *result.run.state.step(k.arrival).config(k.id);
    result.run.decisions.push_back(std::move(r));
  }
  result.objective = compute_metrics(result.run.state).objective;
  return result;
}

}  // namespace nfv
