#include "nfv/heuristic.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>

#include "nfv/error.hpp"

namespace nfv {

std::vector<StepState> WindowPlan::steps(int from, int to, std::size_t vm_count) const {
  std::vector<StepState> out(static_cast<std::size_t>(std::max(0, to - from)));
  for (auto& s : out) s.vms.assign(vm_count, VmStep{});
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.admitted) continue;
    for (int t = std::max(from, spans[i].first); t < std::min(to, spans[i].second); ++t) {
      auto& s = out[static_cast<std::size_t>(t - from)];
      s.configs.push_back(r.config);
      s.served.push_back(r.request);
    }
  }
  for (auto& s : out) std::sort(s.served.begin(), s.served.end());
  return out;
}

int ready_step(const DeploymentState& state, VmId vm, int t) {
  const int setup = state.network().vm(vm).setup_steps;
  for (int a = t; a < t + setup; ++a) {
    bool ready = true;
    for (int j = 1; j <= setup; ++j) {
      const int st = a - j;
      if (st < 0) {
        ready = false;
        break;
      }
      if (st >= t) continue;
      const auto& v = state.step(st).vms[static_cast<std::size_t>(vm)];
      if (v.active) break;
      if (!v.turning_on) {
        ready = false;
        break;
      }
    }
    if (ready) return a;
  }
  return t + setup;
}

WindowPlan plan_horizon(const DeploymentState& state, int t, const PlannerConfig& config, const WindowPlan* previous) {
  if (config.period < 1 || config.horizon < config.period) throw Error("planner needs 1 <= period <= horizon");
  const Problem& p = state.problem();
  const auto& net = p.network;
  WindowPlan plan;
  plan.begin = t;
  plan.end = std::min(t + config.horizon, p.lifespan());

  Ledger ledger(net, plan.begin, plan.end);
  for (std::size_t m = 0; m < net.vm_count(); ++m) {
    ledger.set_ready_from(static_cast<VmId>(m), ready_step(state, static_cast<VmId>(m), t));
  }

  struct Item {
    const ServiceRequest* k;
    double revenue;
    const RequestConfig* fallback = nullptr;
    bool held = false;
  };
  std::vector<Item> continuing;
  std::vector<Item> fresh;
  std::map<int, const RequestConfig*> promised;
  if (previous) {
    for (const auto& r : previous->results) {
      if (r.admitted) promised[r.request] = &r.config;
    }
  }
  for (const auto& k : p.workload.requests) {
    if (k.departure <= t || k.arrival >= plan.end) continue;
    const double rev = horizon_revenue(k, p.services[static_cast<std::size_t>(k.service)], t, config.horizon, p.units);
    if (k.arrival < t) {
      if (t > 0 && state.served(k.id, t - 1)) continuing.push_back({&k, rev, state.step(t - 1).config(k.id)});
    } else {
      auto it = promised.find(k.id);
      fresh.push_back({&k, rev, it == promised.end() ? nullptr : it->second});
    }
  }
  auto order = [](const Item& a, const Item& b) {
    if (a.revenue != b.revenue) return a.revenue > b.revenue;
    if (a.k->arrival != b.k->arrival) return a.k->arrival < b.k->arrival;
    return a.k->id < b.k->id;
  };
  std::sort(continuing.begin(), continuing.end(), order);
  std::sort(fresh.begin(), fresh.end(), order);

  auto span = [&](const Item& i) { return std::pair{std::max(t, i.k->arrival), std::min(plan.end, i.k->departure)}; };
  auto hold = [&](Item& i) {
    const auto [a, b] = span(i);
    if (i.fallback && !i.held && ledger.fits(p, *i.fallback, a, b)) {
      ledger.reserve(p, *i.fallback, a, b);
      i.held = true;
    }
  };
  auto unhold = [&](Item& i) {
    if (!i.held) return;
    const auto [a, b] = span(i);
    ledger.release(p, *i.fallback, a, b);
    i.held = false;
  };
  auto record = [&](PlanResult r, const Item& i, bool continuing_request, bool fell_back) {
    plan.results.push_back(std::move(r));
    plan.spans.push_back(span(i));
    plan.continuing.push_back(continuing_request);
    plan.fell_back.push_back(fell_back);
  };

  // Requests already being served keep their configuration at t-1 as a guaranteed
  // fallback; those admitted by the previous window but not started yet keep the
  // promised one for as long as no higher-revenue request needs its resources.
  for (auto& c : continuing) hold(c);
  for (auto& f : fresh) hold(f);

  Deployer deployer(p, ledger);
  for (auto& c : continuing) {
    const auto [a, b] = span(c);
    unhold(c);
    auto r = deployer.bsrd(c.k->id, a, b);
    const bool fell_back = !r.admitted;
    if (fell_back) {
      r.admitted = true;
      r.config = *c.fallback;
    }
    ledger.reserve(p, r.config, a, b);
    record(std::move(r), c, true, fell_back);
  }
  for (std::size_t n = 0; n < fresh.size(); ++n) {
    auto& f = fresh[n];
    const auto [a, b] = span(f);
    unhold(f);
    auto r = deployer.bsrd(f.k->id, a, b);
    bool displaced = false;
    if (!r.admitted) {
      for (std::size_t m = n + 1; m < fresh.size(); ++m) {
        if (fresh[m].held) {
          unhold(fresh[m]);
          displaced = true;
        }
      }
      if (displaced) r = deployer.bsrd(f.k->id, a, b);
    }
    bool fell_back = false;
    if (!r.admitted && f.fallback && ledger.fits(p, *f.fallback, a, b)) {
      r.admitted = true;
      r.config = *f.fallback;
      fell_back = true;
    }
    if (r.admitted) ledger.reserve(p, r.config, a, b);
    if (displaced) {
      for (std::size_t m = n + 1; m < fresh.size(); ++m) hold(fresh[m]);
    }
    record(std::move(r), f, false, fell_back);
  }
  return plan;
}

RunResult run_heuristic(std::shared_ptr<const Problem> problem, const PlannerConfig& config, std::ostream* log) {
  RunResult run{DeploymentState(problem), {}};
  auto& state = run.state;
  const auto& net = problem->network;
  const int T = problem->lifespan();
  std::map<int, PlanResult> last;
  std::optional<WindowPlan> previous;

  for (int t = 0; t < T; t += config.period) {
    auto plan = plan_horizon(state, t, config, previous ? &*previous : nullptr);
    const int stop = std::min(t + config.period, T);

    auto hosting = hosting_table(state);
    for (int s = t; s < T; ++s) std::fill(hosting[static_cast<std::size_t>(s)].begin(), hosting[static_cast<std::size_t>(s)].end(), 0);
    const auto window = plan.steps(plan.begin, plan.end, net.vm_count());
    for (int s = plan.begin; s < plan.end; ++s) {
      for (const auto& c : window[static_cast<std::size_t>(s - plan.begin)].configs) {
        for (const auto& i : c.instances) hosting[static_cast<std::size_t>(s)][static_cast<std::size_t>(i.vm)] = 1;
      }
    }
    std::vector<StepState> commit(window.begin(), window.begin() + (stop - t));
    for (int s = t; s < stop; ++s) commit[static_cast<std::size_t>(s - t)].vms = vm_states_at(net, hosting, s);
    step_forward(state, std::move(commit), t);

    for (std::size_t i = 0; i < plan.results.size(); ++i) {
      const auto& r = plan.results[i];
      const int k = r.request;
      // decisions about requests arriving after the committed period are provisional
      if (!plan.continuing[i] && plan.spans[i].first >= stop) continue;
      auto it = last.find(k);
      if (it != last.end() && !plan.continuing[i]) continue;
      PlanResult keep = r;
      if (it != last.end()) {
        keep.rounds = std::max(keep.rounds, it->second.rounds);
        keep.backtracks += it->second.backtracks;
        keep.max_instances = std::max(keep.max_instances, it->second.max_instances);
      }
      last[k] = keep;
    }
    if (log) {
      *log << "window t=" << t << " [" << plan.begin << "," << plan.end << ")";
      for (std::size_t i = 0; i < plan.results.size(); ++i) {
        const auto& r = plan.results[i];
        *log << " k" << r.request << (plan.continuing[i] ? "c" : "n") << ":"
             << (r.admitted ? (plan.fell_back[i] ? "kept" : "ok") : reason_name(r.reason)) << "/b" << r.backtracks;
      }
      *log << "\n";
    }
    previous = std::move(plan);
  }
  for (auto& [k, r] : last) run.decisions.push_back(std::move(r));
  return run;
}

}  // namespace nfv
