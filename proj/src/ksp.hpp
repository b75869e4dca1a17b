#pragma once

#include <vector>

#include "nfv/topology.hpp"

namespace nfv::detail {

/// Yen's k loop-free shortest paths by delay over the links flagged `usable`.
/// Result is ordered by (delay, hop ids lexicographically).
std::vector<Route> k_shortest_paths(std::size_t node_count, const std::vector<PhysicalLink>& links,
                                    const std::vector<bool>& usable, NodeId src, NodeId dst, int k);

}  // namespace nfv::detail
