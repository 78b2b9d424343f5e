#include "abocs/graph.hpp"

namespace abocs {

bool reachable_marked_cycle(
    int num_nodes, const std::function<void(int, std::vector<int>&)>& succs,
    const std::vector<int>& roots, const std::function<bool(int)>& marked) {
  const int kUnvisited = -1;
  std::vector<int> index(num_nodes, kUnvisited), lowlink(num_nodes, 0);
  std::vector<char> onstack(num_nodes, 0), selfloop(num_nodes, 0);
  std::vector<int> stack;
  int counter = 0;

  struct Frame {
    int v;
    std::vector<int> succ;
    std::size_t next = 0;
  };
  std::vector<Frame> dfs;

  auto open = [&](int v) {
    index[v] = lowlink[v] = counter++;
    stack.push_back(v);
    onstack[v] = 1;
    Frame f;
    f.v = v;
    succs(v, f.succ);
    for (int w : f.succ)
      if (w == v) selfloop[v] = 1;
    dfs.push_back(std::move(f));
  };

  for (int root : roots) {
    if (index[root] != kUnvisited) continue;
    open(root);
    while (!dfs.empty()) {
      Frame& f = dfs.back();
      if (f.next < f.succ.size()) {
        int w = f.succ[f.next++];
        if (index[w] == kUnvisited) {
          open(w);
        } else if (onstack[w]) {
          if (index[w] < lowlink[f.v]) lowlink[f.v] = index[w];
        }
        continue;
      }
      int v = f.v;
      if (lowlink[v] == index[v]) {
        bool any_marked = false;
        int size = 0;
        std::size_t top = stack.size();
        while (top > 0 && stack[top - 1] != v) --top;
        for (std::size_t i = top - 1; i < stack.size(); ++i) {
          ++size;
          if (marked(stack[i])) any_marked = true;
        }
        bool cycle = size > 1 || selfloop[v];
        if (any_marked && cycle) return true;
        while (stack.size() >= top) {
          onstack[stack.back()] = 0;
          stack.pop_back();
        }
      }
      int low = lowlink[v];
      dfs.pop_back();
      if (!dfs.empty() && low < lowlink[dfs.back().v])
        lowlink[dfs.back().v] = low;
    }
  }
  return false;
}

}  // namespace abocs
