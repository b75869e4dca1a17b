#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace nfv {

using VmId = int;
using NodeId = int;
using DcId = int;
using LinkId = int;

/// The single artificial VM that every ingress/egress flow starts from or ends at.
inline constexpr VmId kDummyVm = -1;
inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

/// Plain-data description of an infrastructure, as read from a scenario file.
struct TopologyDescription {
  struct Datacenter {
    std::string id;
    double capacity = 0;
    std::string gateway;  // empty: the datacenter's only VM, if it has exactly one
  };
  struct Vm {
    std::string id;
    std::string datacenter;
    double capacity = 0;   // computation units per ms
    double cpu_cost = 0;   // currency per computation unit per hour
    double idle_cost = 0;  // currency per hour while turning on or active
    int setup_steps = 1;
  };
  struct Link {
    std::string src;
    std::string dst;
    double bandwidth = kUnlimited;  // packets per ms
    double delay = 0;               // ms
    double cost = 0;                // currency per Gb
    bool bidirectional = true;
  };

  std::vector<Datacenter> datacenters;
  std::vector<Vm> vms;
  std::vector<std::string> switches;
  std::vector<Link> links;
};

struct ComputeNode {
  std::string name;
  NodeId node = -1;
  DcId datacenter = -1;
  double capacity = 0;
  double cpu_cost = 0;
  double idle_cost = 0;
  int setup_steps = 1;
};

struct Datacenter {
  std::string name;
  double capacity = 0;
  std::vector<VmId> members;
  NodeId gateway = -1;  // -1: no inter-datacenter connectivity
};

struct PhysicalLink {
  LinkId id = -1;
  NodeId src = -1;
  NodeId dst = -1;
  double bandwidth = kUnlimited;
  double delay = 0;
  double tx_cost = 0;
  bool intra_dc = false;
};

struct Node {
  std::string name;
  VmId vm = -1;  // -1 for switches
};

/// Identifies one logical link: a VM pair plus the index of the gateway route used.
struct LinkRef {
  VmId src = kDummyVm;
  VmId dst = kDummyVm;
  int route = 0;

  friend auto operator<=>(const LinkRef&, const LinkRef&) = default;
};

/// A loop-free physical path between two datacenter gateways.
struct Route {
  std::vector<LinkId> hops;
  double delay = 0;
  double tx_cost = 0;
};

struct LogicalLink {
  LinkRef ref;
  std::span<const LinkId> hops;
  double delay = 0;
  double tx_cost = 0;
  bool is_dummy = false;

  VmId src() const { return ref.src; }
  VmId dst() const { return ref.dst; }
  bool unlimited() const { return hops.empty(); }
};

/// Infrastructure graph plus the catalog of logical links between VMs.
///
/// Logical links are not materialised per VM pair: inter-datacenter routes are
/// enumerated once between gateways and shared by every VM pair of the two
/// datacenters. Pairs inside one datacenter get a single ideal link, and the
/// dummy VM reaches every VM through one ideal link in each direction.
class PhysicalNetwork {
 public:
  static PhysicalNetwork build(const TopologyDescription& description, int k_paths = 3);

  /// Recomputes the gateway route table with up to `k` paths per ordered pair.
  void enumerate_logical_links(int k);

  int k_paths() const { return k_paths_; }
  std::size_t vm_count() const { return vms_.size(); }
  std::size_t switch_count() const { return nodes_.size() - vms_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t datacenter_count() const { return dcs_.size(); }

  const std::vector<ComputeNode>& vms() const { return vms_; }
  const std::vector<Datacenter>& datacenters() const { return dcs_; }
  const std::vector<PhysicalLink>& links() const { return links_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  const ComputeNode& vm(VmId id) const { return vms_.at(static_cast<std::size_t>(id)); }
  const PhysicalLink& link(LinkId id) const { return links_.at(static_cast<std::size_t>(id)); }

  /// Every logical link from `src` to `dst` (either may be the dummy VM), ordered
  /// by delay then hop ids.
  std::vector<LogicalLink> links_between(VmId src, VmId dst) const;

  /// Resolves a reference; throws nfv::Error for references outside the catalog.
  LogicalLink logical_link(const LinkRef& ref) const;
  bool contains(const LinkRef& ref) const;

  /// Routes between the gateways of two datacenters.
  const std::vector<Route>& routes(DcId from, DcId to) const;

  /// Number of logical links in the catalog, dummy links included.
  std::size_t logical_link_count() const;
  std::size_t dummy_link_count() const { return 2 * vms_.size(); }

  VmId find_vm(const std::string& name) const;

 private:
  std::vector<Node> nodes_;
  std::vector<ComputeNode> vms_;
  std::vector<Datacenter> dcs_;
  std::vector<PhysicalLink> links_;
  std::vector<std::vector<Route>> routes_;  // [from * dc_count + to]
  int k_paths_ = 0;
};

}  // namespace nfv
