#include "nfv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nfv/error.hpp"

namespace nfv {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "nfvsim-scenario/1";

const double kSmallCap = 600, kMediumCap = 1200, kLargeCap = 1800;
const double kSmallCpu = 2e-5, kMediumCpu = 4e-5, kLargeCpu = 6e-5;
const double kSmallIdle = 0.018, kMediumIdle = 0.036, kLargeIdle = 0.054;

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw Error(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      throw Error(where + ": unknown field '" + key + "'");
    }
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

ServiceSpec parse_service(const json& j, const Units& units) {
  only_keys(j, {"id", "vnfs", "chain", "transitions", "ingress_rate", "ingress_rate_mbps", "target_delay", "revenue"}, "service");
  const auto id = get<std::string>(j, "id", "service");
  const std::string where = "service '" + id + "'";
  std::vector<VnfSpec> vnfs;
  for (const auto& v : j.at("vnfs")) {
    only_keys(v, {"id", "complexity", "max_instances"}, where + " vnf");
    vnfs.push_back(VnfSpec{get<std::string>(v, "id", where), get<double>(v, "complexity", where),
                           get_or<int>(v, "max_instances", 1, where)});
  }
  if (j.contains("ingress_rate") == j.contains("ingress_rate_mbps")) {
    throw Error(where + ": give exactly one of ingress_rate and ingress_rate_mbps");
  }
  const double rate = j.contains("ingress_rate") ? get<double>(j, "ingress_rate", where)
                                                 : units.pkt_per_ms_from_mbps(get<double>(j, "ingress_rate_mbps", where));
  auto index = [&](const json& name) -> int {
    if (name.is_null()) return kDummyVnf;
    const auto n = name.get<std::string>();
    for (std::size_t q = 0; q < vnfs.size(); ++q) {
      if (vnfs[q].id == n) return static_cast<int>(q);
    }
    throw Error(where + ": unknown VNF '" + n + "'");
  };

  ServiceSpec s = ServiceSpec::chain(id, vnfs, rate, get<double>(j, "target_delay", where), get<double>(j, "revenue", where));
  if (j.contains("chain") == j.contains("transitions")) throw Error(where + ": give exactly one of chain and transitions");
  const std::size_t n = vnfs.size();
  s.transitions.assign(n, std::vector<double>(n, 0.0));
  s.ingress_probs.assign(n, 0.0);
  s.egress_probs.assign(n, 0.0);
  if (j.contains("chain")) {
    int prev = kDummyVnf;
    for (const auto& name : j.at("chain")) {
      const int q = index(name);
      s.set_prob(prev, q, 1.0);
      prev = q;
    }
    s.set_prob(prev, kDummyVnf, 1.0);
  } else {
    for (const auto& t : j.at("transitions")) {
      only_keys(t, {"from", "to", "p"}, where + " transition");
      s.set_prob(index(t.at("from")), index(t.at("to")), get<double>(t, "p", where));
    }
  }
  auto report = validate_service(s);
  if (!report.valid) throw Error(where + ": " + report.problems.front());
  return s;
}

ojson write_service(const ServiceSpec& s) {
  ojson j;
  j["id"] = s.id;
  auto& vnfs = j["vnfs"] = ojson::array();
  for (const auto& v : s.vnfs) vnfs.push_back(ojson{{"id", v.id}, {"complexity", v.complexity}, {"max_instances", v.max_instances}});
  auto plain = chain_order(s);
  if (plain) {
    for (int q : *plain) {
      if (s.egress_probs[static_cast<std::size_t>(q)] != (q == plain->back() ? 1.0 : 0.0)) plain.reset();
      if (!plain) break;
    }
    if (plain) {
      for (std::size_t i = 0; i + 1 < plain->size(); ++i) {
        if (s.prob((*plain)[i], (*plain)[i + 1]) != 1.0) {
          plain.reset();
          break;
        }
      }
    }
  }
  if (plain) {
    auto& c = j["chain"] = ojson::array();
    for (int q : *plain) c.push_back(s.vnfs[static_cast<std::size_t>(q)].id);
  } else {
    auto& ts = j["transitions"] = ojson::array();
    auto name = [&](int q) { return q == kDummyVnf ? ojson(nullptr) : ojson(s.vnfs[static_cast<std::size_t>(q)].id); };
    for (int a = kDummyVnf; a < static_cast<int>(s.size()); ++a) {
      for (int b = kDummyVnf; b < static_cast<int>(s.size()); ++b) {
        if (a == b) continue;
        const double p = s.prob(a, b);
        if (p > 0) ts.push_back(ojson{{"from", name(a)}, {"to", name(b)}, {"p", p}});
      }
    }
  }
  j["ingress_rate"] = s.ingress_rate;
  j["target_delay"] = s.target_delay;
  j["revenue"] = s.revenue_rate;
  return j;
}

}  // namespace

Scenario builtin_small_scale() {
  Scenario s;
  s.name = "small";
  s.units.bytes_per_packet = 1250;
  auto& net = s.network;
  const struct {
    const char* name;
    double cap, cpu, idle;
  } vms[] = {{"small_a", kSmallCap, kSmallCpu, kSmallIdle},
             {"small_b", kSmallCap, kSmallCpu, kSmallIdle},
             {"medium_a", kMediumCap, kMediumCpu, kMediumIdle},
             {"medium_b", kMediumCap, kMediumCpu, kMediumIdle}};
  for (const auto& v : vms) {
    const std::string dc = std::string("dc_") + v.name;
    net.datacenters.push_back({dc, v.cap, ""});
    net.vms.push_back({v.name, dc, v.cap, v.cpu, v.idle, 1});
  }
  net.links.push_back({"small_a", "small_b", kUnlimited, 2.0, 0.02, true});
  net.links.push_back({"medium_a", "medium_b", kUnlimited, 2.0, 0.04, true});

  const Units& u = s.units;
  s.services.push_back(ServiceSpec::chain("s1", {{"f1", 630, 1}, {"f2", 630, 1}}, u.pkt_per_ms_from_mbps(3), 10, 100));
  s.services.push_back(ServiceSpec::chain("s2", {{"f1", 200, 1}, {"f2", 200, 1}}, u.pkt_per_ms_from_mbps(10), 45, 22.2));
  s.poisson = PoissonWorkload{0.5, 3, 10};
  s.planner = PlannerConfig{5, 2};
  s.k_paths = 3;
  return s;
}

Scenario builtin_large_scale() {
  Scenario s;
  s.name = "large";
  s.units.bytes_per_packet = 320;
  auto& net = s.network;

  constexpr int kNodes = 197, kLinks = 245, kDcs = 32, kPerTier = 14;
  constexpr double kWidth = 4000, kHeight = 2000;  // km
  constexpr double kMsPerKm = 0.005;
  std::mt19937_64 rng(20190611);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<std::pair<double, double>> pos;
  for (int i = 0; i < kNodes; ++i) pos.emplace_back(uniform() * kWidth, uniform() * kHeight);
  auto dist = [&](int a, int b) {
    return std::hypot(pos[static_cast<std::size_t>(a)].first - pos[static_cast<std::size_t>(b)].first,
                      pos[static_cast<std::size_t>(a)].second - pos[static_cast<std::size_t>(b)].second);
  };
  auto node = [](int i) { return "n" + std::to_string(i); };
  for (int i = 0; i < kNodes; ++i) net.switches.push_back(node(i));

  // minimum spanning tree, then the shortest remaining node pairs
  std::set<std::pair<int, int>> edges;
  std::vector<bool> in_tree(kNodes, false);
  std::vector<double> best(kNodes, 1e18);
  std::vector<int> parent(kNodes, -1);
  best[0] = 0;
  for (int it = 0; it < kNodes; ++it) {
    int u = -1;
    for (int v = 0; v < kNodes; ++v) {
      if (!in_tree[static_cast<std::size_t>(v)] && (u < 0 || best[static_cast<std::size_t>(v)] < best[static_cast<std::size_t>(u)])) u = v;
    }
    in_tree[static_cast<std::size_t>(u)] = true;
    if (parent[static_cast<std::size_t>(u)] >= 0) edges.insert({std::min(u, parent[static_cast<std::size_t>(u)]), std::max(u, parent[static_cast<std::size_t>(u)])});
    for (int v = 0; v < kNodes; ++v) {
      if (!in_tree[static_cast<std::size_t>(v)] && dist(u, v) < best[static_cast<std::size_t>(v)]) {
        best[static_cast<std::size_t>(v)] = dist(u, v);
        parent[static_cast<std::size_t>(v)] = u;
      }
    }
  }
  std::vector<std::pair<double, std::pair<int, int>>> pairs;
  for (int a = 0; a < kNodes; ++a) {
    for (int b = a + 1; b < kNodes; ++b) {
      if (!edges.count({a, b})) pairs.push_back({dist(a, b), {a, b}});
    }
  }
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 0; static_cast<int>(edges.size()) < kLinks; ++i) edges.insert(pairs[i].second);

  const double bandwidth = s.units.pkt_per_ms_from_mbps(100000);
  for (const auto& [a, b] : edges) {
    net.links.push_back({node(a), node(b), bandwidth, dist(a, b) * kMsPerKm, 0.0025, true});
  }

  std::vector<int> gateways(kNodes);
  for (int i = 0; i < kNodes; ++i) gateways[static_cast<std::size_t>(i)] = i;
  for (int i = kNodes - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform() * (i + 1));
    std::swap(gateways[static_cast<std::size_t>(i)], gateways[static_cast<std::size_t>(std::min(j, i))]);
  }
  gateways.resize(kDcs);
  std::sort(gateways.begin(), gateways.end());
  const struct {
    const char* tier;
    double cap, cpu, idle;
  } tiers[] = {{"small", kSmallCap, kSmallCpu, kSmallIdle},
               {"medium", kMediumCap, kMediumCpu, kMediumIdle},
               {"large", kLargeCap, kLargeCpu, kLargeIdle}};
  for (int d = 0; d < kDcs; ++d) {
    const std::string dc = "dc" + std::to_string(d);
    net.datacenters.push_back({dc, kPerTier * (kSmallCap + kMediumCap + kLargeCap), node(gateways[static_cast<std::size_t>(d)])});
    for (const auto& t : tiers) {
      for (int i = 0; i < kPerTier; ++i) {
        net.vms.push_back({dc + "_" + t.tier + std::to_string(i), dc, t.cap, t.cpu, t.idle, 1});
      }
    }
  }

  const Units& u = s.units;
  auto five = [](double heavy_omega, int heavy_n) {
    std::vector<VnfSpec> v;
    for (int i = 1; i <= 5; ++i) {
      const bool heavy = i == 2 || i == 3;
      v.push_back({"f" + std::to_string(i), heavy ? heavy_omega : 1.0, heavy ? heavy_n : 1});
    }
    return v;
  };
  s.services.push_back(ServiceSpec::chain("s1", five(1, 1), u.pkt_per_ms_from_mbps(3), 10, 100));
  s.services.push_back(ServiceSpec::chain("s2", five(1, 1), u.pkt_per_ms_from_mbps(10), 45, 22.2));
  s.services.push_back(ServiceSpec::chain("s3", five(1, 1), u.pkt_per_ms_from_mbps(15), 80, 12.5));
  s.services.push_back(ServiceSpec::chain("s4", five(3, 3), u.pkt_per_ms_from_mbps(400), 2500, 0.4));
  s.poisson = PoissonWorkload{1.0 / 3.0, 120, 1440};
  s.planner = PlannerConfig{40, 20};
  s.k_paths = 3;
  return s;
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
  only_keys(j, {"schema", "name", "units", "network", "services", "workload", "planner", "multipliers", "seed"}, "scenario");
  if (get_or<std::string>(j, "schema", "", "scenario") != kSchema) throw Error(std::string("scenario: expected schema ") + kSchema);
  Scenario s;
  s.name = get_or<std::string>(j, "name", "scenario", "scenario");
  if (j.contains("units")) {
    const auto& u = j["units"];
    only_keys(u, {"step_ms", "bytes_per_packet"}, "units");
    s.units.step_ms = get_or<double>(u, "step_ms", s.units.step_ms, "units");
    s.units.bytes_per_packet = get_or<double>(u, "bytes_per_packet", s.units.bytes_per_packet, "units");
  }

  const auto& n = j.at("network");
  only_keys(n, {"datacenters", "vms", "switches", "links"}, "network");
  for (const auto& d : n.at("datacenters")) {
    only_keys(d, {"id", "capacity", "gateway"}, "datacenter");
    s.network.datacenters.push_back({get<std::string>(d, "id", "datacenter"), get<double>(d, "capacity", "datacenter"),
                                     get_or<std::string>(d, "gateway", "", "datacenter")});
  }
  for (const auto& v : n.at("vms")) {
    only_keys(v, {"id", "datacenter", "capacity", "cpu_cost", "idle_cost", "setup_steps"}, "vm");
    s.network.vms.push_back({get<std::string>(v, "id", "vm"), get<std::string>(v, "datacenter", "vm"), get<double>(v, "capacity", "vm"),
                             get<double>(v, "cpu_cost", "vm"), get<double>(v, "idle_cost", "vm"), get_or<int>(v, "setup_steps", 1, "vm")});
  }
  if (n.contains("switches")) s.network.switches = n["switches"].get<std::vector<std::string>>();
  if (n.contains("links")) {
    for (const auto& l : n["links"]) {
      only_keys(l, {"src", "dst", "bandwidth", "delay", "cost", "bidirectional"}, "link");
      TopologyDescription::Link link;
      link.src = get<std::string>(l, "src", "link");
      link.dst = get<std::string>(l, "dst", "link");
      if (l.contains("bandwidth") && !l["bandwidth"].is_null()) link.bandwidth = get<double>(l, "bandwidth", "link");
      link.delay = get_or<double>(l, "delay", 0.0, "link");
      link.cost = get_or<double>(l, "cost", 0.0, "link");
      link.bidirectional = get_or<bool>(l, "bidirectional", true, "link");
      s.network.links.push_back(link);
    }
  }

  for (const auto& sj : j.at("services")) s.services.push_back(parse_service(sj, s.units));

  const auto& w = j.at("workload");
  only_keys(w, {"poisson", "explicit"}, "workload");
  if (w.contains("poisson") == w.contains("explicit")) throw Error("workload: give exactly one of poisson and explicit");
  if (w.contains("poisson")) {
    const auto& p = w["poisson"];
    only_keys(p, {"rate", "mean_duration", "lifespan"}, "workload.poisson");
    s.poisson = PoissonWorkload{get<double>(p, "rate", "poisson"), get<double>(p, "mean_duration", "poisson"), get<int>(p, "lifespan", "poisson")};
  } else {
    std::vector<std::string> ids;
    for (const auto& sv : s.services) ids.push_back(sv.id);
    auto e = w["explicit"];
    e["schema"] = "nfvsim-workload/1";
    s.requests = workload_from_json(e.dump(), ids);
    s.poisson.lifespan = s.requests->lifespan;
  }

  if (j.contains("planner")) {
    const auto& p = j["planner"];
    only_keys(p, {"horizon", "period", "k_paths"}, "planner");
    s.planner.horizon = get_or<int>(p, "horizon", s.planner.horizon, "planner");
    s.planner.period = get_or<int>(p, "period", s.planner.period, "planner");
    s.k_paths = get_or<int>(p, "k_paths", s.k_paths, "planner");
  }
  if (j.contains("multipliers")) {
    const auto& m = j["multipliers"];
    only_keys(m, {"traffic", "delay"}, "multipliers");
    s.traffic_multiplier = get_or<double>(m, "traffic", 1.0, "multipliers");
    s.delay_multiplier = get_or<double>(m, "delay", 1.0, "multipliers");
  }
  s.seed = get_or<std::uint64_t>(j, "seed", 1, "scenario");
  if (!(s.traffic_multiplier > 0) || !(s.delay_multiplier > 0)) throw Error("multipliers must be positive");
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  ojson j;
  j["schema"] = kSchema;
  j["name"] = s.name;
  j["units"] = ojson{{"step_ms", s.units.step_ms}, {"bytes_per_packet", s.units.bytes_per_packet}};
  auto& n = j["network"];
  n["datacenters"] = ojson::array();
  for (const auto& d : s.network.datacenters) {
    ojson e{{"id", d.id}, {"capacity", d.capacity}};
    if (!d.gateway.empty()) e["gateway"] = d.gateway;
    n["datacenters"].push_back(e);
  }
  n["vms"] = ojson::array();
  for (const auto& v : s.network.vms) {
    n["vms"].push_back(ojson{{"id", v.id}, {"datacenter", v.datacenter}, {"capacity", v.capacity}, {"cpu_cost", v.cpu_cost},
                             {"idle_cost", v.idle_cost}, {"setup_steps", v.setup_steps}});
  }
  n["switches"] = s.network.switches;
  n["links"] = ojson::array();
  for (const auto& l : s.network.links) {
    ojson e{{"src", l.src}, {"dst", l.dst}};
    e["bandwidth"] = l.bandwidth == kUnlimited ? ojson(nullptr) : ojson(l.bandwidth);
    e["delay"] = l.delay;
    e["cost"] = l.cost;
    e["bidirectional"] = l.bidirectional;
    n["links"].push_back(e);
  }
  j["services"] = ojson::array();
  for (const auto& sv : s.services) j["services"].push_back(write_service(sv));
  if (s.requests) {
    std::vector<std::string> ids;
    for (const auto& sv : s.services) ids.push_back(sv.id);
    auto e = ojson::parse(workload_to_json(*s.requests, ids));
    e.erase("schema");
    j["workload"] = ojson{{"explicit", e}};
  } else {
    j["workload"] = ojson{{"poisson", {{"rate", s.poisson.rate}, {"mean_duration", s.poisson.mean_duration}, {"lifespan", s.poisson.lifespan}}}};
  }
  j["planner"] = ojson{{"horizon", s.planner.horizon}, {"period", s.planner.period}, {"k_paths", s.k_paths}};
  j["multipliers"] = ojson{{"traffic", s.traffic_multiplier}, {"delay", s.delay_multiplier}};
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

std::shared_ptr<const Problem> instantiate(const Scenario& s, std::uint64_t seed) {
  auto desc = s.network;
  for (auto& l : desc.links) l.delay *= s.delay_multiplier;
  auto services = s.services;
  for (auto& sv : services) sv.ingress_rate *= s.traffic_multiplier;
  Workload w = s.requests ? *s.requests
                          : generate_poisson(services.size(), s.poisson.rate, s.poisson.mean_duration, s.poisson.lifespan, seed,
                                             s.units.step_ms);
  return Problem::make(PhysicalNetwork::build(desc, s.k_paths), std::move(services), std::move(w), s.units);
}

}  // namespace nfv
