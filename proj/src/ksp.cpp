#include "ksp.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <utility>

namespace nfv::detail {
namespace {

struct Graph {
  std::vector<std::vector<LinkId>> out;
  const std::vector<PhysicalLink>* links;
};

Route make_route(const std::vector<PhysicalLink>& links, std::vector<LinkId> hops) {
  Route r;
  for (LinkId id : hops) {
    r.delay += links[static_cast<std::size_t>(id)].delay;
    r.tx_cost += links[static_cast<std::size_t>(id)].tx_cost;
  }
  r.hops = std::move(hops);
  return r;
}

bool route_less(const Route& a, const Route& b) {
  if (a.delay != b.delay) return a.delay < b.delay;
  return a.hops < b.hops;
}

std::optional<std::vector<LinkId>> dijkstra(const Graph& g, NodeId src, NodeId dst,
                                            const std::vector<bool>& node_blocked,
                                            const std::set<LinkId>& link_blocked) {
  const std::size_t n = g.out.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<LinkId> pred(n, -1);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(src)] = 0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    if (u == dst) break;
    for (LinkId id : g.out[static_cast<std::size_t>(u)]) {
      if (link_blocked.count(id)) continue;
      const auto& l = (*g.links)[static_cast<std::size_t>(id)];
      const auto v = static_cast<std::size_t>(l.dst);
      if (node_blocked[v]) continue;
      const double nd = d + l.delay;
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = id;
        heap.emplace(nd, l.dst);
      }
    }
  }
  if (dist[static_cast<std::size_t>(dst)] == std::numeric_limits<double>::infinity()) return std::nullopt;
  std::vector<LinkId> hops;
  for (NodeId v = dst; v != src;) {
    LinkId id = pred[static_cast<std::size_t>(v)];
    hops.push_back(id);
    v = (*g.links)[static_cast<std::size_t>(id)].src;
  }
  std::reverse(hops.begin(), hops.end());
  return hops;
}

std::vector<NodeId> path_nodes(const std::vector<PhysicalLink>& links, NodeId src,
                               const std::vector<LinkId>& hops) {
  std::vector<NodeId> nodes{src};
  for (LinkId id : hops) nodes.push_back(links[static_cast<std::size_t>(id)].dst);
  return nodes;
}

}  // namespace

std::vector<Route> k_shortest_paths(std::size_t node_count, const std::vector<PhysicalLink>& links,
                                    const std::vector<bool>& usable, NodeId src, NodeId dst, int k) {
  std::vector<Route> found;
  if (k <= 0) return found;
  if (src == dst) {
    found.push_back(Route{});
    return found;
  }
  Graph g{std::vector<std::vector<LinkId>>(node_count), &links};
  for (const auto& l : links) {
    if (usable[static_cast<std::size_t>(l.id)]) g.out[static_cast<std::size_t>(l.src)].push_back(l.id);
  }

  std::vector<bool> no_nodes(node_count, false);
  auto first = dijkstra(g, src, dst, no_nodes, {});
  if (!first) return found;
  found.push_back(make_route(links, std::move(*first)));

  auto cmp = [](const Route& a, const Route& b) { return route_less(a, b); };
  std::set<Route, decltype(cmp)> candidates(cmp);

  while (static_cast<int>(found.size()) < k) {
    const Route prev = found.back();
    const auto prev_nodes = path_nodes(links, src, prev.hops);
    for (std::size_t i = 0; i < prev.hops.size(); ++i) {
      const NodeId spur = prev_nodes[i];
      std::vector<LinkId> root(prev.hops.begin(), prev.hops.begin() + static_cast<std::ptrdiff_t>(i));

      std::set<LinkId> blocked_links;
      for (const auto& p : found) {
        if (p.hops.size() > i && std::equal(root.begin(), root.end(), p.hops.begin())) {
          blocked_links.insert(p.hops[i]);
        }
      }
      std::vector<bool> blocked_nodes(node_count, false);
      for (std::size_t j = 0; j < i; ++j) blocked_nodes[static_cast<std::size_t>(prev_nodes[j])] = true;

      auto spur_path = dijkstra(g, spur, dst, blocked_nodes, blocked_links);
      if (!spur_path) continue;
      root.insert(root.end(), spur_path->begin(), spur_path->end());
      Route candidate = make_route(links, std::move(root));
      const bool known = std::any_of(found.begin(), found.end(),
                                     [&](const Route& r) { return r.hops == candidate.hops; });
      if (!known) candidates.insert(std::move(candidate));
    }
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  std::stable_sort(found.begin(), found.end(), route_less);
  return found;
}

}  // namespace nfv::detail
