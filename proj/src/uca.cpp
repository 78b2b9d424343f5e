#include "abocs/uca.hpp"

#include "abocs/graph.hpp"

namespace abocs {

void Uca::validate() const {
  if (num_states < 0 || num_letters <= 0)
    throw ValidationError("automaton needs a nonempty alphabet");
  if (static_cast<int>(delta.size()) != num_states)
    throw ValidationError("transition table size mismatch");
  for (const auto& row : delta) {
    if (static_cast<int>(row.size()) != num_letters)
      throw ValidationError("transition row size mismatch");
    for (const IdSet& s : row)
      for (int q : s)
        if (q < 0 || q >= num_states)
          throw ValidationError("successor state out of range");
  }
  for (int q : initial)
    if (q < 0 || q >= num_states)
      throw ValidationError("initial state out of range");
  for (int q : rejecting)
    if (q < 0 || q >= num_states)
      throw ValidationError("rejecting state out of range");
}

bool Uca::is_total() const {
  for (const auto& row : delta)
    for (const IdSet& s : row)
      if (s.empty()) return false;
  return true;
}

Uca complete_uca(const Uca& a) {
  Uca b = a;
  int sink = b.num_states++;
  b.delta.emplace_back(b.num_letters, IdSet{sink});
  for (int q = 0; q < sink; ++q)
    for (int l = 0; l < b.num_letters; ++l)
      if (b.delta[q][l].empty()) b.delta[q][l].insert(sink);
  return b;
}

namespace {

bool marked_cycle_on_lasso(const Uca& a, const std::vector<int>& prefix,
                           const std::vector<int>& period) {
  if (period.empty()) throw ValidationError("lasso period must be nonempty");
  int p = static_cast<int>(prefix.size());
  int n = static_cast<int>(period.size());
  int positions = p + n;
  auto letter_at = [&](int pos) {
    return pos < p ? prefix[pos] : period[pos - p];
  };
  auto next_pos = [&](int pos) { return pos + 1 < positions ? pos + 1 : p; };
  int num_nodes = a.num_states * positions;
  auto succs = [&](int node, std::vector<int>& out) {
    int q = node / positions, pos = node % positions;
    int l = letter_at(pos);
    int np = next_pos(pos);
    for (int q2 : a.delta[q][l]) out.push_back(q2 * positions + np);
  };
  std::vector<int> roots;
  for (int q0 : a.initial) roots.push_back(q0 * positions + 0);
  auto marked = [&](int node) {
    return a.rejecting.contains(node / positions);
  };
  return reachable_marked_cycle(num_nodes, succs, roots, marked);
}

}  // namespace

bool uca_accepts_lasso(const Uca& a, const std::vector<int>& prefix,
                       const std::vector<int>& period) {
  return !marked_cycle_on_lasso(a, prefix, period);
}

bool nba_accepts_lasso(const Nba& a, const std::vector<int>& prefix,
                       const std::vector<int>& period) {
  return marked_cycle_on_lasso(a, prefix, period);
}

}  // namespace abocs
