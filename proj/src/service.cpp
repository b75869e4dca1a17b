#include "nfv/service.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "nfv/error.hpp"

namespace nfv {
namespace {

constexpr double kProbTolerance = 1e-9;

std::size_t idx(int q) { return static_cast<std::size_t>(q); }

// Kahn's algorithm over edges with positive probability; empty when cyclic.
std::vector<int> topological_order(const ServiceSpec& s) {
  const std::size_t n = s.size();
  std::vector<int> indeg(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (s.transitions[a][b] > 0) ++indeg[b];
    }
  }
  std::vector<int> order;
  std::vector<int> ready;
  for (std::size_t q = 0; q < n; ++q) {
    if (indeg[q] == 0) ready.push_back(static_cast<int>(q));
  }
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    int q = ready.back();
    ready.pop_back();
    order.push_back(q);
    for (std::size_t b = 0; b < n; ++b) {
      if (s.transitions[idx(q)][b] > 0 && --indeg[b] == 0) ready.push_back(static_cast<int>(b));
    }
  }
  if (order.size() != n) order.clear();
  return order;
}

void check_shape(const ServiceSpec& s) {
  const std::size_t n = s.size();
  if (n == 0) throw Error("service '" + s.id + "' has no VNFs");
  if (s.transitions.size() != n || s.ingress_probs.size() != n || s.egress_probs.size() != n) {
    throw Error("service '" + s.id + "' has mis-sized transition tables");
  }
  for (const auto& row : s.transitions) {
    if (row.size() != n) throw Error("service '" + s.id + "' has mis-sized transition tables");
  }
}

}  // namespace

ServiceSpec ServiceSpec::chain(std::string id, std::vector<VnfSpec> vnfs, double ingress_rate, double target_delay,
                               double revenue_rate) {
  ServiceSpec s;
  s.id = std::move(id);
  const std::size_t n = vnfs.size();
  s.vnfs = std::move(vnfs);
  s.transitions.assign(n, std::vector<double>(n, 0.0));
  s.ingress_probs.assign(n, 0.0);
  s.egress_probs.assign(n, 0.0);
  if (n > 0) {
    s.ingress_probs.front() = 1.0;
    s.egress_probs.back() = 1.0;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) s.transitions[i][i + 1] = 1.0;
  s.ingress_rate = ingress_rate;
  s.target_delay = target_delay;
  s.revenue_rate = revenue_rate;
  return s;
}

double ServiceSpec::prob(int from, int to) const {
  if (from == kDummyVnf && to == kDummyVnf) return 0.0;
  if (from == kDummyVnf) return ingress_probs.at(idx(to));
  if (to == kDummyVnf) return egress_probs.at(idx(from));
  return transitions.at(idx(from)).at(idx(to));
}

void ServiceSpec::set_prob(int from, int to, double p) {
  if (from == kDummyVnf) {
    ingress_probs.at(idx(to)) = p;
  } else if (to == kDummyVnf) {
    egress_probs.at(idx(from)) = p;
  } else {
    transitions.at(idx(from)).at(idx(to)) = p;
  }
}

double EdgeTraffic::at(int from, int to) const {
  if (from == kDummyVnf && to == kDummyVnf) return 0.0;
  if (from == kDummyVnf) return ingress.at(idx(to));
  if (to == kDummyVnf) return egress.at(idx(from));
  return between.at(idx(from)).at(idx(to));
}

bool is_acyclic(const ServiceSpec& s) { return !topological_order(s).empty(); }

std::vector<double> solve_vnf_rates(const ServiceSpec& s) {
  check_shape(s);
  const std::size_t n = s.size();
  std::vector<double> rates(n, 0.0);

  // lambda(q) = lambda_new * P(o,q) + sum_{q' != q} lambda(q') * P(q',q)
  auto order = topological_order(s);
  if (!order.empty()) {
    for (int q : order) rates[idx(q)] = s.ingress_rate * s.ingress_probs[idx(q)];
    for (int q : order) {
      for (std::size_t b = 0; b < n; ++b) {
        if (b != idx(q)) rates[b] += rates[idx(q)] * s.transitions[idx(q)][b];
      }
    }
    return rates;
  }

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXd inflow(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    inflow(static_cast<Eigen::Index>(a)) = s.ingress_rate * s.ingress_probs[a];
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s.transitions[a][b];
    }
  }
  const double radius = p.eigenvalues().cwiseAbs().maxCoeff();
  if (radius >= 1.0 - 1e-12) {
    throw Error("service '" + s.id + "': traffic does not dissipate around a cycle (spectral radius " +
                std::to_string(radius) + ")");
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(p.rows(), p.cols()) - p.transpose();
  const Eigen::VectorXd x = system.partialPivLu().solve(inflow);
  for (std::size_t q = 0; q < n; ++q) rates[q] = x(static_cast<Eigen::Index>(q));
  return rates;
}

EdgeTraffic edge_traffic(const ServiceSpec& s, std::span<const double> rates) {
  check_shape(s);
  const std::size_t n = s.size();
  EdgeTraffic e;
  e.between.assign(n, std::vector<double>(n, 0.0));
  e.ingress.assign(n, 0.0);
  e.egress.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    e.ingress[a] = s.ingress_rate * s.ingress_probs[a];
    e.egress[a] = rates[a] * s.egress_probs[a];
    for (std::size_t b = 0; b < n; ++b) e.between[a][b] = rates[a] * s.transitions[a][b];
  }
  return e;
}

std::vector<double> scaling_factor(const ServiceSpec& s, const EdgeTraffic& edges) {
  const std::size_t n = s.size();
  std::vector<double> alpha(n, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    double in = edges.ingress[q];
    double out = edges.egress[q];
    for (std::size_t o = 0; o < n; ++o) {
      in += edges.between[o][q];
      out += edges.between[q][o];
    }
    if (!(in > 0)) throw Error("service '" + s.id + "': VNF '" + s.vnfs[q].id + "' receives no traffic");
    alpha[q] = out / in;
  }
  return alpha;
}

TrafficProfile derive_traffic(const ServiceSpec& s) {
  TrafficProfile t;
  t.vnf_rates = solve_vnf_rates(s);
  t.edges = edge_traffic(s, t.vnf_rates);
  t.scaling = scaling_factor(s, t.edges);
  return t;
}

std::optional<std::vector<int>> chain_order(const ServiceSpec& s) {
  check_shape(s);
  const std::size_t n = s.size();
  int start = -1;
  for (std::size_t q = 0; q < n; ++q) {
    if (s.ingress_probs[q] > 0) {
      if (start >= 0) return std::nullopt;
      start = static_cast<int>(q);
    }
  }
  if (start < 0 || std::abs(s.ingress_probs[idx(start)] - 1.0) > kProbTolerance) return std::nullopt;
  std::vector<int> order{start};
  std::vector<bool> seen(n, false);
  seen[idx(start)] = true;
  for (int cur = start;;) {
    int next = -1;
    for (std::size_t b = 0; b < n; ++b) {
      if (s.transitions[idx(cur)][b] > 0) {
        if (next >= 0) return std::nullopt;
        next = static_cast<int>(b);
      }
    }
    if (next < 0) break;
    if (seen[idx(next)]) return std::nullopt;
    seen[idx(next)] = true;
    order.push_back(next);
    cur = next;
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

std::vector<double> delay_budgets(const ServiceSpec& s) {
  auto order = chain_order(s);
  if (!order) throw Error("service '" + s.id + "' is not a chain; the planner only deploys chains");
  double total = 0;
  for (const auto& v : s.vnfs) total += v.complexity;
  std::vector<double> budgets(s.size(), 0.0);
  double assigned = 0;
  for (std::size_t i = 0; i < order->size(); ++i) {
    const int q = (*order)[i];
    if (i + 1 == order->size()) {
      budgets[idx(q)] = s.target_delay - assigned;
    } else {
      budgets[idx(q)] = s.target_delay * s.vnfs[idx(q)].complexity / total;
      assigned += budgets[idx(q)];
    }
  }
  return budgets;
}

std::vector<std::vector<int>> vnf_paths(const ServiceSpec& s, std::size_t cap) {
  if (!is_acyclic(s)) throw Error("service '" + s.id + "' is cyclic; ingress-to-egress paths are unbounded");
  std::vector<std::vector<int>> paths;
  std::vector<int> current;
  std::function<void(int)> dfs = [&](int q) {
    current.push_back(q);
    if (s.egress_probs[idx(q)] > 0) {
      if (paths.size() == cap) throw Error("service '" + s.id + "' has more than " + std::to_string(cap) + " VNF paths");
      paths.push_back(current);
    }
    for (std::size_t b = 0; b < s.size(); ++b) {
      if (s.transitions[idx(q)][b] > 0) dfs(static_cast<int>(b));
    }
    current.pop_back();
  };
  for (std::size_t q = 0; q < s.size(); ++q) {
    if (s.ingress_probs[q] > 0) dfs(static_cast<int>(q));
  }
  return paths;
}

ServiceReport validate_service(const ServiceSpec& s) {
  ServiceReport r;
  auto fail = [&](std::string msg) {
    r.valid = false;
    r.problems.push_back(std::move(msg));
  };
  try {
    check_shape(s);
  } catch (const Error& e) {
    fail(e.what());
    return r;
  }
  const std::size_t n = s.size();
  if (!(s.ingress_rate > 0)) fail("ingress rate must be positive");
  if (!(s.target_delay > 0)) fail("target delay must be positive");
  if (s.revenue_rate < 0) fail("revenue rate must be nonnegative");

  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  double ingress_sum = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const auto& v = s.vnfs[q];
    if (!(v.complexity > 0)) fail("VNF '" + v.id + "' complexity must be positive");
    if (v.max_instances < 1) fail("VNF '" + v.id + "' needs max_instances >= 1");
    if (!in_unit(s.ingress_probs[q]) || !in_unit(s.egress_probs[q])) fail("VNF '" + v.id + "' has a probability outside [0,1]");
    ingress_sum += s.ingress_probs[q];
    double out = s.egress_probs[q];
    for (std::size_t b = 0; b < n; ++b) {
      if (!in_unit(s.transitions[q][b])) fail("VNF '" + v.id + "' has a probability outside [0,1]");
      out += s.transitions[q][b];
    }
    if (s.transitions[q][q] > 0) fail("VNF '" + v.id + "' forwards to itself");
    if (out > 1.0 + kProbTolerance) fail("VNF '" + v.id + "' outgoing probabilities sum to " + std::to_string(out));
    if (!(out > 0)) fail("VNF '" + v.id + "' forwards no traffic");
  }
  if (std::abs(ingress_sum - 1.0) > kProbTolerance) fail("ingress probabilities sum to " + std::to_string(ingress_sum));

  r.acyclic = is_acyclic(s);
  if (r.valid) {
    try {
      auto rates = solve_vnf_rates(s);
      for (std::size_t q = 0; q < n; ++q) {
        if (!(rates[q] > 0)) fail("VNF '" + s.vnfs[q].id + "' is unreachable");
      }
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  r.chain = r.valid && chain_order(s).has_value();
  return r;
}

}  // namespace nfv
