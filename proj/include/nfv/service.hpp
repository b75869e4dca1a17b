#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nfv {

/// Index of the artificial end-point VNF in transition and traffic tables.
inline constexpr int kDummyVnf = -1;

struct VnfSpec {
  std::string id;
  double complexity = 1;  // computation units per packet
  int max_instances = 1;
};

/// A service as a VNF forwarding graph.
///
/// `transitions[a][b]` is the probability that a packet processed at VNF `a` is
/// forwarded to VNF `b`; `ingress_probs[q]` and `egress_probs[q]` cover the
/// edges from and to the dummy VNF. Outgoing probabilities of a VNF may sum to
/// less than one, the remainder being dropped traffic.
struct ServiceSpec {
  std::string id;
  std::vector<VnfSpec> vnfs;
  std::vector<std::vector<double>> transitions;
  std::vector<double> ingress_probs;
  std::vector<double> egress_probs;
  double ingress_rate = 0;  // packets per ms
  double target_delay = 0;  // ms
  double revenue_rate = 0;  // currency per Gb

  /// A linear chain with probability-one transitions.
  static ServiceSpec chain(std::string id, std::vector<VnfSpec> vnfs, double ingress_rate, double target_delay,
                           double revenue_rate);

  std::size_t size() const { return vnfs.size(); }
  /// Transition probability; either side may be kDummyVnf.
  double prob(int from, int to) const;
  void set_prob(int from, int to, double p);
};

/// Per-edge traffic; the ingress and egress vectors hold the edges touching the dummy VNF.
struct EdgeTraffic {
  std::vector<std::vector<double>> between;
  std::vector<double> ingress;
  std::vector<double> egress;

  double at(int from, int to) const;
};

/// Static traffic quantities of a validated service.
struct TrafficProfile {
  std::vector<double> vnf_rates;
  EdgeTraffic edges;
  std::vector<double> scaling;

  double traffic(int from, int to) const { return edges.at(from, to); }
};

std::vector<double> solve_vnf_rates(const ServiceSpec& s);
EdgeTraffic edge_traffic(const ServiceSpec& s, std::span<const double> rates);
std::vector<double> scaling_factor(const ServiceSpec& s, const EdgeTraffic& edges);
TrafficProfile derive_traffic(const ServiceSpec& s);

/// VNF indices along the chain, or nothing when the graph is not a single chain
/// with one ingress VNF entered with probability one.
std::optional<std::vector<int>> chain_order(const ServiceSpec& s);

/// Share of the target delay given to each VNF (indexed like `s.vnfs`),
/// proportional to complexity. Only defined for chains.
std::vector<double> delay_budgets(const ServiceSpec& s);

/// All ingress-to-egress VNF sequences of an acyclic graph; throws past `cap`.
std::vector<std::vector<int>> vnf_paths(const ServiceSpec& s, std::size_t cap = 64);

bool is_acyclic(const ServiceSpec& s);

struct ServiceReport {
  bool valid = true;
  bool chain = false;
  bool acyclic = true;
  std::vector<std::string> problems;
};

ServiceReport validate_service(const ServiceSpec& s);

}  // namespace nfv
