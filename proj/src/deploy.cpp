#include "nfv/deploy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "nfv/error.hpp"
#include "nfv/validate.hpp"

namespace nfv {
namespace {

constexpr double kEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool positive(double x) { return x > 1e-12; }

}  // namespace

const char* reason_name(Reason r) {
  switch (r) {
    case Reason::none: return "none";
    case Reason::traffic: return "traffic";
    case Reason::delay: return "delay";
    case Reason::structure: return "structure";
  }
  return "?";
}

const PlacedInstance* VnfDeployment::on(VmId vm) const {
  for (const auto& i : instances) {
    if (i.vm == vm) return &i;
  }
  return nullptr;
}

Deployer::Deployer(const Problem& problem, const Ledger& ledger, DeployOptions options)
    : p_(problem), ledger_(ledger), opt_(options) {
  const auto& net = p_.network;
  classes_.resize(net.datacenter_count());
  for (std::size_t d = 0; d < net.datacenter_count(); ++d) {
    auto& groups = classes_[d];
    std::vector<std::pair<double, double>> keys;
    for (VmId m : net.datacenters()[d].members) {
      const auto& v = net.vm(m);
      std::pair<double, double> key{v.capacity, v.cpu_cost};
      auto it = std::find(keys.begin(), keys.end(), key);
      if (it == keys.end()) {
        keys.push_back(key);
        groups.emplace_back();
        it = keys.end() - 1;
      }
      groups[static_cast<std::size_t>(it - keys.begin())].push_back(m);
    }
    for (auto& g : groups) std::sort(g.begin(), g.end());
  }
}

PlanContext Deployer::start(int request, int begin, int end) {
  residual_memo_.assign(p_.network.links().size(), std::numeric_limits<double>::quiet_NaN());
  const auto& s = p_.service_of(request);
  auto order = chain_order(s);
  if (!order) throw Error("service '" + s.id + "' is not a chain");
  PlanContext ctx;
  ctx.request = request;
  ctx.begin = begin;
  ctx.end = end;
  ctx.chain = *order;
  const auto budgets = delay_budgets(s);
  double sum = 0;
  for (int q : ctx.chain) {
    sum += budgets[static_cast<std::size_t>(q)];
    ctx.cumulative_budget.push_back(sum);
  }
  return ctx;
}

double Deployer::phys_residual(const PlanContext& ctx, LinkId e) {
  double& r = residual_memo_[static_cast<std::size_t>(e)];
  if (std::isnan(r)) r = ledger_.link_residual(e, ctx.begin, ctx.end);
  return r;
}

double Deployer::link_room(const PlanContext& ctx, const LogicalLink& l, const std::map<LinkId, double>& pending) {
  double room = kInf;
  for (LinkId e : l.hops) {
    double r = phys_residual(ctx, e);
    if (r == kInf) continue;
    if (auto it = ctx.own_link_use.find(e); it != ctx.own_link_use.end()) r -= it->second;
    if (auto it = pending.find(e); it != pending.end()) r -= it->second;
    room = std::min(room, r);
  }
  return room;
}

bool Deployer::used_by(const PlanContext& ctx, VmId vm) const {
  for (const auto& d : ctx.deployed) {
    if (d.on(vm)) return true;
  }
  return false;
}

int Deployer::instance_limit(int vnf, const ServiceSpec& s) const {
  int n = s.vnfs[static_cast<std::size_t>(vnf)].max_instances;
  if (opt_.instance_cap > 0) n = std::min(n, opt_.instance_cap);
  return n;
}

VptrResult Deployer::vptr(PlanContext& ctx, std::size_t i, int n, Strategy strategy) {
  const auto& net = p_.network;
  const auto& s = p_.service_of(ctx.request);
  const auto& tr = p_.traffic_of(ctx.request);
  const int q1 = i == 0 ? kDummyVnf : ctx.chain[i - 1];
  const int q2 = ctx.chain[i];
  const double omega = s.vnfs[static_cast<std::size_t>(q2)].complexity;
  const double p12 = s.prob(q1, q2);

  VptrResult res;
  res.deployment.vnf = q2;

  // unsent outgoing traffic of every instance of q1
  std::vector<std::pair<VmId, double>> sources;
  if (i == 0) {
    sources.emplace_back(kDummyVm, tr.traffic(kDummyVnf, q2));
  } else {
    for (const auto& inst : ctx.deployed[i - 1].instances) sources.emplace_back(inst.vm, inst.intake * p12);
  }
  double remaining = tr.traffic(q1, q2);
  const double total = remaining;

  std::map<LinkId, double> pending;
  std::map<VmId, double> assigned;
  std::map<VmId, double> cpu_left;
  auto send = [&](std::size_t src, const LogicalLink& l, double amount) {
    sources[src].second -= amount;
    remaining -= amount;
    for (LinkId e : l.hops) pending[e] += amount;
    assigned[l.dst()] += amount;
    cpu_left[l.dst()] -= amount * omega;
    res.deployment.flows.push_back(Flow{l.ref, amount});
  };
  auto cpu_room = [&](VmId m) {
    auto it = cpu_left.find(m);
    return it == cpu_left.end() ? net.vm(m).capacity : it->second;
  };

  std::set<VmId> taken;
  if (opt_.use_cache && !ctx.cache.empty()) {
    const int q3 = static_cast<std::size_t>(i + 1) < ctx.chain.size() ? ctx.chain[i + 1] : kDummyVnf;
    const double forward = s.prob(q2, q3);
    bool consumed = false;
    for (const auto& entry : ctx.cache) {
      if (entry.vnf != q2 || !(forward > 0)) continue;
      consumed = true;
      const VmId m = entry.vm;
      if (!ledger_.vm_available(m, ctx.begin, ctx.end) || used_by(ctx, m)) continue;
      const double limit = entry.amount / forward;
      for (std::size_t src = 0; src < sources.size(); ++src) {
        for (const auto& l : net.links_between(sources[src].first, m)) {
          const double c = std::min(link_room(ctx, l, pending), cpu_room(m) / omega);
          const double amount = std::min({sources[src].second, c, limit - assigned[m], remaining});
          if (positive(amount)) send(src, l, amount);
        }
      }
      if (positive(assigned[m])) {
        taken.insert(m);
        --n;
      }
    }
    if (consumed) ctx.cache.clear();
  }

  std::vector<Candidate> cands;
  if (n > 0 && remaining > 1e-9 * total) {
    // within a datacenter, VMs of equal capacity and price are interchangeable for
    // ranking, so only the first n available ones of each class can make the cut
    std::vector<VmId> pool;
    for (const auto& dc : classes_) {
      for (const auto& group : dc) {
        int picked = 0;
        for (VmId m : group) {
          if (picked == n) break;
          if (taken.count(m) || used_by(ctx, m) || !ledger_.vm_available(m, ctx.begin, ctx.end)) continue;
          pool.push_back(m);
          ++picked;
        }
      }
    }
    for (const auto& [src, out] : sources) {
      if (!positive(out)) continue;
      for (VmId m : pool) {
        for (const auto& l : net.links_between(src, m)) {
          const double room = std::min(link_room(ctx, l, pending), net.vm(m).capacity / omega);
          if (!positive(room)) continue;
          cands.push_back(Candidate{l.ref, omega * net.vm(m).cpu_cost + l.tx_cost, room});
        }
      }
    }
    if (strategy == Strategy::cheapest) {
      std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.cost != b.cost ? a.cost < b.cost : a.link < b.link;
      });
    } else {
      std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.room != b.room ? a.room > b.room : a.link < b.link;
      });
    }
    std::vector<VmId> top;
    std::size_t cut = 0;
    for (; cut < cands.size(); ++cut) {
      const VmId d = cands[cut].link.dst;
      if (std::find(top.begin(), top.end(), d) != top.end()) continue;
      if (static_cast<int>(top.size()) == n) break;
      top.push_back(d);
    }
    if (static_cast<int>(top.size()) < n) {
      res.fail = Reason::structure;
      return res;
    }
    cands.resize(cut);

    double cap_sum = 0;
    for (VmId m : top) cap_sum += net.vm(m).capacity;
    std::map<VmId, double> intake_cap;
    for (VmId m : top) intake_cap[m] = net.vm(m).capacity / cap_sum * remaining;

    for (const auto& c : cands) {
      const auto l = net.logical_link(c.link);
      std::size_t src = 0;
      while (sources[src].first != l.src()) ++src;
      const double fill = std::min(link_room(ctx, l, pending), cpu_room(l.dst()) / omega);
      const double amount = std::min({sources[src].second, fill, intake_cap[l.dst()] - assigned[l.dst()]});
      if (positive(amount)) send(src, l, amount);
    }
  }

  if (remaining > 1e-9 * total) {
    res.fail = Reason::traffic;
    ctx.cache.clear();
    if (i > 0) {
      for (const auto& [vm, left] : sources) {
        const auto* inst = ctx.deployed[i - 1].on(vm);
        const double sent = inst->intake * p12 - left;
        if (positive(sent)) ctx.cache.push_back(CacheEntry{vm, q1, sent});
      }
    }
    return res;
  }

  for (const auto& [vm, amount] : assigned) {
    if (positive(amount)) res.deployment.instances.push_back(PlacedInstance{vm, 0, amount, 0, 0});
  }
  res.deployment.flows.erase(
      std::remove_if(res.deployment.flows.begin(), res.deployment.flows.end(), [](const Flow& f) { return !positive(f.amount); }),
      res.deployment.flows.end());
  return res;
}

bool Deployer::ca(const PlanContext& ctx, std::size_t i, VnfDeployment& dep, Mode mode) const {
  const auto& net = p_.network;
  const auto& s = p_.service_of(ctx.request);
  const double omega = s.vnfs[static_cast<std::size_t>(dep.vnf)].complexity;
  const double budget = ctx.cumulative_budget[i];
  bool ok = true;
  for (auto& inst : dep.instances) {
    double in = 0;
    double before = 0;
    for (const auto& f : dep.flows) {
      if (f.link.dst != inst.vm) continue;
      in += f.amount;
      double prior = 0;
      if (f.link.src != kDummyVm) prior = ctx.deployed[i - 1].on(f.link.src)->delay_after;
      before = std::max(before, prior + net.logical_link(f.link).delay);
    }
    const double max_rate = net.vm(inst.vm).capacity / omega;
    double mu = max_rate;
    if (mode == Mode::normal) {
      const double slack = budget - before;
      mu = slack > 0 ? in + 1.0 / slack : kInf;
      if (!(mu > in && mu <= max_rate)) {
        mu = max_rate;
        ok = false;
      }
    }
    inst.intake = in;
    inst.rate = mu;
    inst.delay_before = before;
    inst.delay_after = mu - in > kEps ? before + 1.0 / (mu - in) : kInf;
    if (exceeds(inst.delay_after - budget, budget)) ok = false;
  }
  return ok;
}

void Deployer::push(PlanContext& ctx, VnfDeployment dep) const {
  for (const auto& f : dep.flows) {
    for (LinkId e : p_.network.logical_link(f.link).hops) ctx.own_link_use[e] += f.amount;
  }
  ctx.deployed.push_back(std::move(dep));
}

void Deployer::pop(PlanContext& ctx) const {
  for (const auto& f : ctx.deployed.back().flows) {
    for (LinkId e : p_.network.logical_link(f.link).hops) ctx.own_link_use[e] -= f.amount;
  }
  ctx.deployed.pop_back();
}

PlanResult Deployer::bsrd(int request, int begin, int end) {
  PlanResult out;
  out.request = request;
  PlanContext ctx = start(request, begin, end);
  const auto& s = p_.service_of(request);
  const auto& net = p_.network;
  const std::size_t len = ctx.chain.size();

  auto reject = [&](Reason r) {
    out.admitted = false;
    out.reason = r;
    out.config = RequestConfig{};
    out.config.request = request;
    return out;
  };

  std::size_t i = 0;
  while (i < len) {
    ++out.rounds;
    const int q = ctx.chain[i];
    const int limit = instance_limit(q, s);
    std::optional<VnfDeployment> done;
    std::optional<VnfDeployment> late;  // passed placement, missed its delay budget
    Reason why = Reason::structure;
    auto attempt = [&](int n, Strategy st, Mode mode) {
      auto r = vptr(ctx, i, n, st);
      if (r.fail != Reason::none) {
        if (r.fail == Reason::traffic && why == Reason::structure) why = Reason::traffic;
        return false;
      }
      if (ca(ctx, i, r.deployment, mode)) {
        done = std::move(r.deployment);
        return true;
      }
      why = Reason::delay;
      late = std::move(r.deployment);
      return false;
    };

    const Mode mode = ctx.status;
    if (mode == Mode::normal) {
      bool hit = false;
      for (int n = 1; n <= limit && !hit; ++n) {
        if (opt_.cheapest && attempt(n, Strategy::cheapest, mode)) hit = true;
        if (!hit && opt_.largest && attempt(n, Strategy::largest, mode)) hit = true;
      }
    } else {
      ctx.can_backtrack = false;
      attempt(limit, Strategy::largest, mode);
    }

    VnfDeployment* fresh = nullptr;
    if (done) {
      if (mode == Mode::normal) ctx.can_backtrack = true;
      push(ctx, std::move(*done));
      fresh = &ctx.deployed.back();
      ctx.status = Mode::normal;
      ++i;
    } else {
      ctx.status = Mode::critical;
      if (ctx.can_backtrack && opt_.allow_backtrack) {
        pop(ctx);
        --i;
        ++out.backtracks;
      } else if (why == Reason::delay && opt_.allow_compensation) {
        push(ctx, std::move(*late));
        fresh = &ctx.deployed.back();
        ++i;
      } else {
        return reject(why);
      }
    }

    if (fresh) {
      for (const auto& inst : fresh->instances) {
        if (exceeds(inst.delay_after - s.target_delay, s.target_delay)) return reject(Reason::delay);
      }
      std::map<DcId, double> cpu;
      for (const auto& d : ctx.deployed) {
        const double omega = s.vnfs[static_cast<std::size_t>(d.vnf)].complexity;
        for (const auto& inst : d.instances) cpu[net.vm(inst.vm).datacenter] += inst.rate * omega;
      }
      for (const auto& [dc, used] : cpu) {
        const double room = ledger_.dc_residual(dc, begin, end);
        if (exceeds(used - room, room)) return reject(Reason::traffic);
      }
    }
  }

  out.admitted = true;
  out.config = assemble(ctx);
  for (const auto& d : ctx.deployed) out.max_instances = std::max(out.max_instances, static_cast<int>(d.instances.size()));
  return out;
}

RequestConfig Deployer::assemble(const PlanContext& ctx) const {
  const auto& s = p_.service_of(ctx.request);
  const auto& tr = p_.traffic_of(ctx.request);
  RequestConfig c;
  c.request = ctx.request;
  for (std::size_t i = 0; i < ctx.deployed.size(); ++i) {
    const auto& d = ctx.deployed[i];
    const int from = i == 0 ? kDummyVnf : ctx.chain[i - 1];
    const double total = tr.traffic(from, d.vnf);
    for (const auto& inst : d.instances) c.instances.push_back(InstanceAssignment{inst.vm, d.vnf, inst.rate});
    for (const auto& f : d.flows) c.routes.push_back(RouteAssignment{f.link, from, d.vnf, f.amount / total});
    const double egress = s.prob(d.vnf, kDummyVnf);
    if (egress > 0) {
      const double out_total = tr.traffic(d.vnf, kDummyVnf);
      for (const auto& inst : d.instances) {
        c.routes.push_back(RouteAssignment{LinkRef{inst.vm, kDummyVm, 0}, d.vnf, kDummyVnf, inst.intake * egress / out_total});
      }
    }
  }
  return c;
}

}  // namespace nfv
