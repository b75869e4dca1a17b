#include "nfv/topology.hpp"

#include <map>

#include "ksp.hpp"
#include "nfv/error.hpp"

namespace nfv {

PhysicalNetwork PhysicalNetwork::build(const TopologyDescription& desc, int k_paths) {
  PhysicalNetwork net;
  std::map<std::string, NodeId> node_ids;
  std::map<std::string, DcId> dc_ids;

  auto add_node = [&](const std::string& name, VmId vm) {
    if (name.empty()) throw Error("node with empty id");
    if (!node_ids.emplace(name, static_cast<NodeId>(net.nodes_.size())).second) {
      throw Error("duplicate node id '" + name + "'");
    }
    net.nodes_.push_back(Node{name, vm});
  };

  for (const auto& d : desc.datacenters) {
    if (!(d.capacity > 0)) throw Error("datacenter '" + d.id + "' has nonpositive capacity");
    if (!dc_ids.emplace(d.id, static_cast<DcId>(net.dcs_.size())).second) {
      throw Error("duplicate datacenter id '" + d.id + "'");
    }
    net.dcs_.push_back(Datacenter{d.id, d.capacity, {}, -1});
  }

  for (const auto& v : desc.vms) {
    auto dc = dc_ids.find(v.datacenter);
    if (dc == dc_ids.end()) throw Error("VM '" + v.id + "' references unknown datacenter '" + v.datacenter + "'");
    if (!(v.capacity > 0)) throw Error("VM '" + v.id + "' has nonpositive capacity");
    if (v.setup_steps < 1) throw Error("VM '" + v.id + "' needs setup_steps >= 1");
    if (v.cpu_cost < 0 || v.idle_cost < 0) throw Error("VM '" + v.id + "' has negative cost");
    const auto id = static_cast<VmId>(net.vms_.size());
    add_node(v.id, id);
    net.vms_.push_back(ComputeNode{v.id, static_cast<NodeId>(net.nodes_.size() - 1), dc->second, v.capacity,
                                   v.cpu_cost, v.idle_cost, v.setup_steps});
    net.dcs_[static_cast<std::size_t>(dc->second)].members.push_back(id);
  }
  for (const auto& s : desc.switches) add_node(s, -1);

  for (std::size_t i = 0; i < desc.datacenters.size(); ++i) {
    auto& dc = net.dcs_[i];
    const auto& gw = desc.datacenters[i].gateway;
    if (!gw.empty()) {
      auto it = node_ids.find(gw);
      if (it == node_ids.end()) throw Error("datacenter '" + dc.name + "' has unknown gateway '" + gw + "'");
      const Node& node = net.nodes_[static_cast<std::size_t>(it->second)];
      if (node.vm >= 0 && net.vms_[static_cast<std::size_t>(node.vm)].datacenter != static_cast<DcId>(i)) {
        throw Error("datacenter '" + dc.name + "' uses a VM of another datacenter as gateway");
      }
      dc.gateway = it->second;
    } else if (dc.members.size() == 1) {
      dc.gateway = net.vms_[static_cast<std::size_t>(dc.members.front())].node;
    }
  }

  // Datacenter owning a node: VMs directly, switches when they are a gateway.
  std::vector<DcId> node_dc(net.nodes_.size(), -1);
  for (const auto& v : net.vms_) node_dc[static_cast<std::size_t>(v.node)] = v.datacenter;
  for (std::size_t i = 0; i < net.dcs_.size(); ++i) {
    if (net.dcs_[i].gateway >= 0) node_dc[static_cast<std::size_t>(net.dcs_[i].gateway)] = static_cast<DcId>(i);
  }

  auto add_link = [&](NodeId src, NodeId dst, const TopologyDescription::Link& l) {
    PhysicalLink pl;
    pl.id = static_cast<LinkId>(net.links_.size());
    pl.src = src;
    pl.dst = dst;
    const DcId a = node_dc[static_cast<std::size_t>(src)];
    pl.intra_dc = a >= 0 && a == node_dc[static_cast<std::size_t>(dst)];
    if (pl.intra_dc) {
      pl.bandwidth = kUnlimited;
      pl.delay = 0;
      pl.tx_cost = 0;
    } else {
      pl.bandwidth = l.bandwidth;
      pl.delay = l.delay;
      pl.tx_cost = l.cost;
    }
    net.links_.push_back(pl);
  };

  for (const auto& l : desc.links) {
    auto s = node_ids.find(l.src);
    auto d = node_ids.find(l.dst);
    if (s == node_ids.end()) throw Error("link references unknown node '" + l.src + "'");
    if (d == node_ids.end()) throw Error("link references unknown node '" + l.dst + "'");
    if (s->second == d->second) throw Error("self-loop link at '" + l.src + "'");
    if (!(l.bandwidth > 0)) throw Error("link " + l.src + "->" + l.dst + " has nonpositive bandwidth");
    if (l.delay < 0 || l.cost < 0) throw Error("link " + l.src + "->" + l.dst + " has negative delay or cost");
    add_link(s->second, d->second, l);
    if (l.bidirectional) add_link(d->second, s->second, l);
  }

  net.enumerate_logical_links(k_paths);
  return net;
}

void PhysicalNetwork::enumerate_logical_links(int k) {
  if (k < 1) throw Error("k_paths must be >= 1");
  k_paths_ = k;
  const std::size_t n = dcs_.size();
  routes_.assign(n * n, {});
  std::vector<bool> usable(links_.size());
  for (const auto& l : links_) usable[static_cast<std::size_t>(l.id)] = !l.intra_dc;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || dcs_[a].gateway < 0 || dcs_[b].gateway < 0) continue;
      routes_[a * n + b] = detail::k_shortest_paths(nodes_.size(), links_, usable, dcs_[a].gateway,
                                                    dcs_[b].gateway, k);
    }
  }
}

const std::vector<Route>& PhysicalNetwork::routes(DcId from, DcId to) const {
  return routes_.at(static_cast<std::size_t>(from) * dcs_.size() + static_cast<std::size_t>(to));
}

std::vector<LogicalLink> PhysicalNetwork::links_between(VmId src, VmId dst) const {
  std::vector<LogicalLink> out;
  if (src == dst) return out;
  if (src == kDummyVm || dst == kDummyVm) {
    out.push_back(LogicalLink{LinkRef{src, dst, 0}, {}, 0, 0, true});
    return out;
  }
  const auto& a = vm(src);
  const auto& b = vm(dst);
  if (a.datacenter == b.datacenter) {
    out.push_back(LogicalLink{LinkRef{src, dst, 0}, {}, 0, 0, false});
    return out;
  }
  const auto& rs = routes(a.datacenter, b.datacenter);
  out.reserve(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    out.push_back(LogicalLink{LinkRef{src, dst, static_cast<int>(i)}, rs[i].hops, rs[i].delay, rs[i].tx_cost, false});
  }
  return out;
}

bool PhysicalNetwork::contains(const LinkRef& ref) const {
  auto valid_vm = [&](VmId v) { return v == kDummyVm || (v >= 0 && static_cast<std::size_t>(v) < vms_.size()); };
  if (!valid_vm(ref.src) || !valid_vm(ref.dst) || ref.src == ref.dst || ref.route < 0) return false;
  if (ref.src == kDummyVm || ref.dst == kDummyVm) return ref.route == 0;
  const auto& a = vm(ref.src);
  const auto& b = vm(ref.dst);
  if (a.datacenter == b.datacenter) return ref.route == 0;
  return static_cast<std::size_t>(ref.route) < routes(a.datacenter, b.datacenter).size();
}

LogicalLink PhysicalNetwork::logical_link(const LinkRef& ref) const {
  if (!contains(ref)) {
    throw Error("no logical link " + std::to_string(ref.src) + "->" + std::to_string(ref.dst) + "#" +
                std::to_string(ref.route));
  }
  if (ref.src == kDummyVm || ref.dst == kDummyVm) return LogicalLink{ref, {}, 0, 0, true};
  const auto& a = vm(ref.src);
  const auto& b = vm(ref.dst);
  if (a.datacenter == b.datacenter) return LogicalLink{ref, {}, 0, 0, false};
  const auto& r = routes(a.datacenter, b.datacenter)[static_cast<std::size_t>(ref.route)];
  return LogicalLink{ref, r.hops, r.delay, r.tx_cost, false};
}

std::size_t PhysicalNetwork::logical_link_count() const {
  std::size_t count = dummy_link_count();
  for (const auto& a : vms_) {
    for (const auto& b : vms_) {
      if (&a == &b) continue;
      count += a.datacenter == b.datacenter ? 1 : routes(a.datacenter, b.datacenter).size();
    }
  }
  return count;
}

VmId PhysicalNetwork::find_vm(const std::string& name) const {
  for (std::size_t i = 0; i < vms_.size(); ++i) {
    if (vms_[i].name == name) return static_cast<VmId>(i);
  }
  throw Error("unknown VM '" + name + "'");
}

}  // namespace nfv
