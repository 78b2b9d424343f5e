#pragma once

#include <functional>
#include <vector>

namespace abocs {

/* Tarjan over an implicit graph. Returns true iff some node reachable from
 * the roots lies on a cycle through a marked node (an SCC that contains a
 * marked node and at least one edge). */
bool reachable_marked_cycle(
    int num_nodes, const std::function<void(int, std::vector<int>&)>& succs,
    const std::vector<int>& roots, const std::function<bool(int)>& marked);

}  // namespace abocs
