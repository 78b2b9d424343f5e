#include "abocs/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "abocs/graph.hpp"

namespace abocs {

namespace {

CounterFunction overflow_sink(int k) { return {{-1, k + 1}}; }

/* Successor profile under letter (y, u): per product successor the maximum
 * over predecessors of counter plus one when the successor is rejecting.
 * Any counter past k collapses the node into the overflow sink. */
CounterFunction counter_step(const ProductUca& p, int k,
                             const CounterFunction& f, int y, int u) {
  int l = p.letter(y, u);
  std::map<int, int> acc;
  for (auto [s, v] : f)
    for (int s2 : p.uca.delta[s][l]) {
      int v2 = v + (p.uca.rejecting.contains(s2) ? 1 : 0);
      auto [it, fresh] = acc.emplace(s2, v2);
      if (!fresh && v2 > it->second) it->second = v2;
    }
  for (auto [s2, v2] : acc)
    if (v2 > k) return overflow_sink(k);
  return CounterFunction(acc.begin(), acc.end());
}

CounterFunction initial_profile(const ProductUca& p) {
  CounterFunction c;
  for (int s : p.uca.initial)
    c.emplace_back(s, p.uca.rejecting.contains(s) ? 1 : 0);
  return c;
}

bool exceeds(const CounterFunction& f, int k) {
  for (auto [s, v] : f)
    if (v > k) return true;
  return false;
}

/* f below g: fewer tracked states, smaller counters. Winning profiles are
 * downward closed in this order. */
bool dominated(const CounterFunction& f, const CounterFunction& g) {
  auto it = g.begin();
  for (auto [s, v] : f) {
    while (it != g.end() && it->first < s) ++it;
    if (it == g.end() || it->first != s || it->second < v) return false;
  }
  return true;
}

bool dominated_by_any(const CounterFunction& f,
                      const std::vector<CounterFunction>& as) {
  for (const auto& a : as)
    if (dominated(f, a)) return true;
  return false;
}

CounterFunction meet(const CounterFunction& f, const CounterFunction& g) {
  CounterFunction r;
  auto it = g.begin();
  for (auto [s, v] : f) {
    while (it != g.end() && it->first < s) ++it;
    if (it != g.end() && it->first == s)
      r.emplace_back(s, std::min(v, it->second));
  }
  return r;
}

std::vector<CounterFunction> maximal_only(std::vector<CounterFunction> fs) {
  std::sort(fs.begin(), fs.end());
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
  std::vector<CounterFunction> out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < fs.size() && keep; ++j)
      if (j != i && dominated(fs[i], fs[j])) keep = false;
    if (keep) out.push_back(fs[i]);
  }
  return out;
}

/* Largest profile whose step under (y, u) stays below a. Pointwise: a state
 * is tracked iff all its successors are tracked by a with room for the
 * rejecting increment. */
CounterFunction cpre_one(const ProductUca& p, int k, int y, int u,
                         const CounterFunction& a) {
  int l = p.letter(y, u);
  CounterFunction r;
  for (int s = 0; s < p.uca.num_states; ++s) {
    int bound = k;
    bool ok = true;
    for (int s2 : p.uca.delta[s][l]) {
      auto it = std::lower_bound(
          a.begin(), a.end(), std::pair<int, int>{s2, -1},
          [](const auto& x, const auto& y2) { return x.first < y2.first; });
      if (it == a.end() || it->first != s2) {
        ok = false;
        break;
      }
      int c = it->second - (p.uca.rejecting.contains(s2) ? 1 : 0);
      if (c < 0) {
        ok = false;
        break;
      }
      bound = std::min(bound, c);
    }
    if (ok) r.emplace_back(s, bound);
  }
  return r;
}

/* Greatest fixpoint of the controllable predecessor on antichains of
 * maximal winning profiles: f survives iff every output has an input whose
 * step stays below the antichain. */
std::vector<CounterFunction> antichain_winning(const ProductUca& p, int k) {
  CounterFunction top;
  for (int s = 0; s < p.uca.num_states; ++s) top.emplace_back(s, k);
  std::vector<CounterFunction> a{top};
  for (;;) {
    std::vector<CounterFunction> next = a;
    for (int y = 0; y < p.num_outputs; ++y) {
      std::vector<CounterFunction> fy;
      for (int u = 0; u < p.num_inputs; ++u)
        for (const auto& e : a) fy.push_back(cpre_one(p, k, y, u, e));
      fy = maximal_only(std::move(fy));
      std::vector<CounterFunction> merged;
      for (const auto& s : next)
        for (const auto& g : fy) merged.push_back(meet(s, g));
      next = maximal_only(std::move(merged));
    }
    bool same = true;
    for (const auto& e : a)
      if (!dominated_by_any(e, next)) {
        same = false;
        break;
      }
    if (same) return a;
    a = std::move(next);
  }
}

using AllowedFn = std::function<IdSet(const CounterFunction&, int)>;

/* Fixes the lowest permissive input per (memory, output), then drops every
 * step the closed loop with the system can never exercise. The tracked
 * states of a profile are exactly the belief after the same history, so
 * an output is exercised iff some tracked state can emit it. */
MealyController extract_controller(const ProductUca& p,
                                   const FiniteSystem& sys, int k,
                                   const CounterFunction& c0,
                                   const AllowedFn& allowed) {
  int ny = p.num_outputs;
  std::map<CounterFunction, int> id{{c0, 0}};
  std::vector<CounterFunction> mem{c0};
  std::vector<std::vector<std::optional<std::pair<int, int>>>> step;
  for (int z = 0; z < static_cast<int>(mem.size()); ++z) {
    step.emplace_back(ny);
    for (int y = 0; y < ny; ++y) {
      IdSet ok = allowed(mem[z], y);
      if (ok.empty())
        throw ValidationError("no permissive input at a winning node");
      int u = ok.front();
      CounterFunction f2 = counter_step(p, k, mem[z], y, u);
      auto [it, fresh] = id.emplace(f2, static_cast<int>(mem.size()));
      if (fresh) mem.push_back(f2);
      step[z][y] = std::make_pair(u, it->second);
    }
  }

  std::vector<char> live(mem.size(), 0);
  std::set<std::pair<int, int>> used;
  std::deque<int> bfs{0};
  live[0] = 1;
  while (!bfs.empty()) {
    int z = bfs.front();
    bfs.pop_front();
    IdSet emits;
    for (auto [s, v] : mem[z]) {
      if (s < 0) continue;
      int x = p.origin[s].first;
      if (x >= 0) emits = set_union(emits, sys.out[x]);
    }
    for (int y : emits) {
      used.insert({z, y});
      int z2 = step[z][y]->second;
      if (!live[z2]) {
        live[z2] = 1;
        bfs.push_back(z2);
      }
    }
  }

  std::vector<int> remap(mem.size(), -1);
  int kept = 0;
  for (std::size_t z = 0; z < mem.size(); ++z)
    if (live[z]) remap[z] = kept++;

  MealyController m;
  m.outputs = sys.outputs;
  m.inputs = sys.inputs;
  m.num_memory = kept;
  m.initial = 0;
  m.step.assign(kept, std::vector<std::optional<std::pair<int, int>>>(ny));
  for (auto [z, y] : used) {
    auto [u, z2] = *step[z][y];
    m.step[remap[z]][y] = std::make_pair(u, remap[z2]);
  }
  m.validate();
  return m;
}

}  // namespace

SafetyGame kcounter_game(const ProductUca& p, int k) {
  SafetyGame g;
  g.k = k;
  g.num_outputs = p.num_outputs;
  g.num_inputs = p.num_inputs;

  CounterFunction c0 = initial_profile(p);
  if (exceeds(c0, k)) c0 = overflow_sink(k);
  std::map<CounterFunction, int> id{{c0, 0}};
  g.nodes.push_back(c0);
  for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
    bool bad = exceeds(g.nodes[i], k);
    g.unsafe.push_back(bad ? 1 : 0);
    g.succ.emplace_back();
    if (bad) continue;
    auto& rows = g.succ.back();
    rows.assign(g.num_outputs, std::vector<int>(g.num_inputs, -1));
    for (int y = 0; y < g.num_outputs; ++y)
      for (int u = 0; u < g.num_inputs; ++u) {
        CounterFunction f2 = counter_step(p, k, g.nodes[i], y, u);
        auto [it, fresh] = id.emplace(f2, static_cast<int>(g.nodes.size()));
        if (fresh) g.nodes.push_back(f2);
        rows[y][u] = it->second;
      }
  }
  return g;
}

SafetySolution solve_safety(const SafetyGame& g) {
  int n = static_cast<int>(g.nodes.size());
  SafetySolution sol;
  sol.lost.assign(n, 0);
  for (int i = 0; i < n; ++i) sol.lost[i] = g.unsafe[i];

  bool changed = true;
  while (changed) {
    changed = false;
    for (int e = 0; e < n; ++e) {
      if (sol.lost[e]) continue;
      for (int y = 0; y < g.num_outputs && !sol.lost[e]; ++y) {
        bool all = true;
        for (int u = 0; u < g.num_inputs; ++u)
          if (!sol.lost[g.succ[e][y][u]]) {
            all = false;
            break;
          }
        if (all) {
          sol.lost[e] = 1;
          changed = true;
        }
      }
    }
  }

  sol.permissive.assign(n, {});
  for (int e = 0; e < n; ++e) {
    if (sol.lost[e]) continue;
    sol.permissive[e].assign(g.num_outputs, {});
    for (int y = 0; y < g.num_outputs; ++y)
      for (int u = 0; u < g.num_inputs; ++u)
        if (!sol.lost[g.succ[e][y][u]]) sol.permissive[e][y].insert(u);
  }
  sol.winning = !sol.lost.empty() && !sol.lost[0];
  return sol;
}

void MealyController::validate() const {
  if (outputs.size() == 0 || inputs.size() == 0)
    throw ValidationError("controller needs output and input alphabets");
  if (num_memory <= 0) throw ValidationError("controller has no memory state");
  if (initial < 0 || initial >= num_memory)
    throw ValidationError("controller initial memory out of range");
  if (static_cast<int>(step.size()) != num_memory)
    throw ValidationError("controller step table has wrong height");
  for (const auto& row : step) {
    if (static_cast<int>(row.size()) != outputs.size())
      throw ValidationError("controller step table has wrong width");
    for (const auto& cell : row) {
      if (!cell) continue;
      auto [u, z2] = *cell;
      if (u < 0 || u >= inputs.size() || z2 < 0 || z2 >= num_memory)
        throw ValidationError("controller step target out of range");
    }
  }
}

SynthesisResult synthesize(const FiniteSystem& sys, const PredicateMaps& pm,
                           const Uca& spec, int k_max,
                           const SynthesisOptions& opt,
                           const ProductOptions& po) {
  if (k_max < 0) throw ValidationError("negative bound cap");
  ProductUca p = build_product(sys, pm, spec, po);
  for (int k = 0; k <= k_max; ++k) {
    if (opt.antichain) {
      std::vector<CounterFunction> a = antichain_winning(p, k);
      CounterFunction c0 = initial_profile(p);
      if (!dominated_by_any(c0, a)) continue;
      AllowedFn allowed = [&](const CounterFunction& f, int y) {
        IdSet ok;
        for (int u = 0; u < p.num_inputs; ++u)
          if (dominated_by_any(counter_step(p, k, f, y, u), a)) ok.insert(u);
        return ok;
      };
      return extract_controller(p, sys, k, c0, allowed);
    }
    SafetyGame g = kcounter_game(p, k);
    SafetySolution sol = solve_safety(g);
    if (!sol.winning) continue;
    std::map<CounterFunction, int> id;
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i)
      id.emplace(g.nodes[i], i);
    AllowedFn allowed = [&](const CounterFunction& f, int y) {
      return sol.permissive[id.at(f)][y];
    };
    return extract_controller(p, sys, k, g.nodes[0], allowed);
  }
  return Unrealizable{k_max};
}

Strategy induced_strategy(const MealyController& m) {
  return [m](const ExternalPrefix& pre) -> std::optional<int> {
    if (pre.ys.size() != pre.us.size() + 1)
      throw ValidationError("malformed external prefix");
    int z = m.initial;
    for (std::size_t i = 0; i < pre.us.size(); ++i) {
      auto a = m.act(z, pre.ys[i]);
      if (!a || a->first != pre.us[i]) return std::nullopt;
      z = a->second;
    }
    auto a = m.act(z, pre.ys.back());
    if (!a) return std::nullopt;
    return a->first;
  };
}

bool closed_loop_satisfies(const ProductUca& p, const MealyController& m) {
  if (m.outputs.size() != p.num_outputs || m.inputs.size() != p.num_inputs)
    throw AlphabetMismatchError("controller alphabets do not fit the product");
  int zn = m.num_memory;
  bool hole = false;
  auto succs = [&](int n, std::vector<int>& out) {
    int s = n / zn, z = n % zn;
    for (int y = 0; y < p.num_outputs; ++y) {
      bool emit = false;
      for (int u = 0; u < p.num_inputs && !emit; ++u)
        emit = !p.uca.delta[s][p.letter(y, u)].empty();
      if (!emit) continue;
      auto a = m.act(z, y);
      if (!a) {
        hole = true;
        continue;
      }
      for (int s2 : p.uca.delta[s][p.letter(y, a->first)])
        out.push_back(s2 * zn + a->second);
    }
  };
  std::vector<int> roots;
  for (int s : p.uca.initial) roots.push_back(s * zn + m.initial);
  bool bad = reachable_marked_cycle(
      p.uca.num_states * zn, succs, roots,
      [&](int n) { return p.uca.rejecting.contains(n / zn); });
  return !hole && !bad;
}

}  // namespace abocs
