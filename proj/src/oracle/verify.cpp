#include "abocs/oracle/verify.hpp"

#include <optional>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <variant>
#include <vector>

#include "abocs/efrr.hpp"
#include "abocs/errors.hpp"
#include "abocs/ltl.hpp"
#include "abocs/ltl_to_uca.hpp"
#include "abocs/uca.hpp"

namespace abocs::oracle {
namespace {

Uca spec_automaton(LtlFactory& f, const std::string& text,
                   const PredicateMaps& pm) {
  PredAlphabet ab;
  ab.ap_in = pm.ap_in;
  ab.ap_out = pm.ap_out;
  return ltl_to_uca(f, parse_ltl(f, text, ab.ap_in, ab.ap_out), ab);
}

std::string describe_word(const RandomInstance& inst, const YuLasso& w) {
  std::ostringstream os;
  os << "seed " << inst.seed << " spec '" << inst.spec << "' word ";
  for (auto [y, u] : w.prefix) os << "(y" << y << " u" << u << ")";
  os << " loop";
  for (auto [y, u] : w.period) os << " (y" << y << " u" << u << ")";
  return os.str();
}

/* raw-table belief step: successors of b under u that can emit y */
IdSet step_belief(const FiniteSystem& sys, const IdSet& b, int u, int y) {
  IdSet nxt;
  for (int x : b)
    for (int x2 : sys.trans[x][u])
      if (sys.out[x2].contains(y)) nxt.insert(x2);
  return nxt;
}

/* Joint graph of system state and controller memory; a walk through it is
 * exactly one compatible path of one closed-loop behavior. Node v encodes
 * (state, memory) as state * zs + memory. */
struct JointGraph {
  int zs = 1;
  bool ok = true;  // no reachable undefined move or empty successor set
  std::vector<char> reach;
  std::vector<std::vector<int>> adj;
  std::vector<int> starts;
};

JointGraph joint_graph(const FiniteSystem& sys, const MealyController& m) {
  JointGraph g;
  g.zs = m.num_memory;
  int n = sys.num_states() * g.zs;
  g.adj.assign(n, {});
  g.reach.assign(n, 0);
  std::queue<int> bfs;
  for (int x0 : sys.initial) {
    int v = x0 * g.zs + m.initial;
    g.starts.push_back(v);
    if (!g.reach[v]) {
      g.reach[v] = 1;
      bfs.push(v);
    }
  }
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    int x = v / g.zs, z = v % g.zs;
    for (int y : sys.out[x]) {
      auto mv = m.act(z, y);
      if (!mv) {
        g.ok = false;
        continue;
      }
      if (sys.trans[x][mv->first].empty()) {
        g.ok = false;
        continue;
      }
      for (int x2 : sys.trans[x][mv->first]) {
        int w = x2 * g.zs + mv->second;
        g.adj[v].push_back(w);
        if (!g.reach[w]) {
          g.reach[w] = 1;
          bfs.push(w);
        }
      }
    }
  }
  return g;
}

/* does some mask at this state set (or clear) the given proposition bit */
bool may_read(const PredicateMaps& pm, int x, int bit, bool val) {
  for (PredMask msk : pm.state_preds[x])
    if ((((msk >> bit) & 1u) != 0u) == val) return true;
  return false;
}

/* nodes of `sub` reachable from the starts without ever leaving `sub` */
std::vector<char> reach_within(const std::vector<std::vector<int>>& adj,
                               const std::vector<int>& starts,
                               const std::vector<char>& sub) {
  std::vector<char> r(adj.size(), 0);
  std::queue<int> bfs;
  for (int v : starts)
    if (sub[v] && !r[v]) {
      r[v] = 1;
      bfs.push(v);
    }
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int w : adj[v])
      if (sub[w] && !r[w]) {
        r[w] = 1;
        bfs.push(w);
      }
  }
  return r;
}

/* whether the induced subgraph supports an infinite walk: peel nodes with
 * no remaining successor until fixpoint, a nonempty kernel is a cycle */
bool has_cycle(const std::vector<std::vector<int>>& adj,
               std::vector<char> sub) {
  int n = static_cast<int>(adj.size());
  std::vector<std::vector<int>> radj(n);
  std::vector<int> deg(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!sub[v]) continue;
    for (int w : adj[v])
      if (sub[w]) {
        ++deg[v];
        radj[w].push_back(v);
      }
  }
  std::queue<int> dead;
  for (int v = 0; v < n; ++v)
    if (sub[v] && deg[v] == 0) dead.push(v);
  int alive = 0;
  for (int v = 0; v < n; ++v) alive += sub[v] ? 1 : 0;
  while (!dead.empty()) {
    int v = dead.front();
    dead.pop();
    sub[v] = 0;
    --alive;
    for (int p : radj[v])
      if (sub[p] && --deg[p] == 0) dead.push(p);
  }
  return alive > 0;
}

struct Formula {
  enum Kind { True, False, Never, Eventually, Repeatedly, Until } kind;
  int a = -1, b = -1;
};

Formula parse_family(const PredicateMaps& pm, const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> t;
  for (std::string tok; is >> tok;) t.push_back(tok);
  auto id = [&](const std::string& name) {
    int v = pm.ap_out.lookup(name);
    if (v < 0)
      throw ValidationError("unknown proposition in reference formula: " +
                            name);
    return v;
  };
  if (t.size() == 1 && t[0] == "true") return {Formula::True, -1, -1};
  if (t.size() == 1 && t[0] == "false") return {Formula::False, -1, -1};
  if (t.size() == 2 && t[0] == "G" && t[1].size() > 1 && t[1][0] == '!')
    return {Formula::Never, id(t[1].substr(1)), -1};
  if (t.size() == 2 && t[0] == "F") return {Formula::Eventually, id(t[1]), -1};
  if (t.size() == 2 && t[0] == "GF")
    return {Formula::Repeatedly, id(t[1]), -1};
  if (t.size() == 3 && t[1] == "U")
    return {Formula::Until, id(t[0]), id(t[2])};
  throw ValidationError("formula outside the reference family: " + text);
}

}  // namespace

OracleVerdict verify_admissibility(const RandomInstance& inst,
                                   int prefix_bound, int period_bound,
                                   const ProductUca* replace) {
  OracleVerdict v;
  LtlFactory f;
  Uca spec = spec_automaton(f, inst.spec, inst.preds);
  int nu = inst.sys.num_inputs();
  int letters = inst.sys.num_outputs() * nu;
  for (int pl = 0; pl <= prefix_bound; ++pl)
    for (int nl = 1; nl <= period_bound; ++nl) {
      int len = pl + nl;
      std::vector<int> code(len, 0);
      for (;;) {
        YuLasso w;
        std::vector<int> pre, per;
        for (int i = 0; i < len; ++i) {
          int y = code[i] / nu, u = code[i] % nu;
          (i < pl ? w.prefix : w.period).push_back({y, u});
          if (replace) (i < pl ? pre : per).push_back(replace->letter(y, u));
        }
        SemanticsRecord r = iblock_semantics_check(inst.sys, inst.preds, spec, w);
        bool lhs =
            replace ? uca_accepts_lasso(replace->uca, pre, per) : r.in_lang;
        bool rhs = !r.in_iblock && (!r.in_epaths || r.spec_holds);
        ++v.checked;
        if (lhs != rhs) {
          ++v.failures;
          if (v.first_witness.empty()) v.first_witness = describe_word(inst, w);
        }
        int i = 0;
        while (i < len && ++code[i] == letters) {
          code[i] = 0;
          ++i;
        }
        if (i == len) break;
      }
    }
  return v;
}

bool composable_ref(const FiniteSystem& sys, const MealyController& m) {
  // node: belief after the observation, memory before it, the observation
  std::set<std::tuple<IdSet, int, int>> seen;
  std::queue<std::tuple<IdSet, int, int>> bfs;
  IdSet first_outputs;
  for (int x0 : sys.initial)
    for (int y : sys.out[x0]) first_outputs.insert(y);
  for (int y : first_outputs) {
    IdSet b;
    for (int x : sys.initial)
      if (sys.out[x].contains(y)) b.insert(x);
    if (seen.insert({b, m.initial, y}).second) bfs.push({b, m.initial, y});
  }
  while (!bfs.empty()) {
    auto [b, z, y] = bfs.front();
    bfs.pop();
    auto mv = m.act(z, y);
    if (!mv) return false;
    for (int x : b)
      if (sys.trans[x][mv->first].empty()) return false;
    for (int y2 = 0; y2 < sys.num_outputs(); ++y2) {
      IdSet b2 = step_belief(sys, b, mv->first, y2);
      if (b2.empty()) continue;
      if (seen.insert({b2, mv->second, y2}).second)
        bfs.push({b2, mv->second, y2});
    }
  }
  return true;
}

bool loop_satisfies_ref(const FiniteSystem& sys, const PredicateMaps& pm,
                        const std::string& spec, const MealyController& m) {
  Formula f = parse_family(pm, spec);
  JointGraph g = joint_graph(sys, m);
  if (!g.ok) return false;
  int n = static_cast<int>(g.adj.size());
  auto can_read = [&](int bit, bool val) {
    std::vector<char> res(n, 0);
    for (int v = 0; v < n; ++v)
      if (g.reach[v] && may_read(pm, v / g.zs, bit, val)) res[v] = 1;
    return res;
  };
  switch (f.kind) {
    case Formula::True:
      return true;
    case Formula::False:
      return g.starts.empty();
    case Formula::Never: {
      for (int v = 0; v < n; ++v)
        if (g.reach[v] && may_read(pm, v / g.zs, f.a, true)) return false;
      return true;
    }
    case Formula::Eventually: {
      // violated by a run that can avoid the proposition forever
      std::vector<char> avoid = can_read(f.a, false);
      return !has_cycle(g.adj, reach_within(g.adj, g.starts, avoid));
    }
    case Formula::Repeatedly: {
      // violated by any reachable cycle that can avoid it throughout
      return !has_cycle(g.adj, can_read(f.a, false));
    }
    case Formula::Until: {
      // violated if the right side can fail forever, or if both sides can
      // fail at one position reached while the right side fails
      std::vector<char> bav = can_read(f.b, false);
      std::vector<char> r = reach_within(g.adj, g.starts, bav);
      if (has_cycle(g.adj, r)) return false;
      for (int v = 0; v < n; ++v) {
        if (!r[v]) continue;
        for (PredMask msk : pm.state_preds[v / g.zs])
          if (!((msk >> f.a) & 1u) && !((msk >> f.b) & 1u)) return false;
      }
      return true;
    }
  }
  return false;
}

bool exists_winning_controller_ref(const FiniteSystem& sys,
                                   const PredicateMaps& pm,
                                   const std::string& spec, int memory_cap) {
  parse_family(pm, spec);  // reject formulas the detectors cannot judge
  int zs = memory_cap, ny = sys.num_outputs(), nu = sys.num_inputs();
  int cells = zs * ny, moves = nu * zs;
  std::vector<int> code(cells, 0);
  MealyController m;
  m.outputs = sys.outputs;
  m.inputs = sys.inputs;
  m.num_memory = zs;
  m.initial = 0;
  m.step.assign(zs, std::vector<std::optional<std::pair<int, int>>>(ny));
  for (;;) {
    for (int c = 0; c < cells; ++c)
      m.step[c / ny][c % ny] = std::pair{code[c] % nu, code[c] / nu};
    if (composable_ref(sys, m) && loop_satisfies_ref(sys, pm, spec, m))
      return true;
    int i = 0;
    while (i < cells && ++code[i] == moves) {
      code[i] = 0;
      ++i;
    }
    if (i == cells) return false;
  }
}

OracleVerdict verify_soundness(const RandomInstance& inst) {
  OracleVerdict v;
  LtlFactory f;
  Uca spec = spec_automaton(f, inst.spec, inst.preds);
  ProductUca p = build_product(inst.sys, inst.preds, spec);
  SynthesisResult res =
      synthesize(inst.sys, inst.preds, spec, default_k_max(p, inst.sys));
  if (std::holds_alternative<Unrealizable>(res)) return v;
  const auto& m = std::get<MealyController>(res);
  ++v.checked;
  if (!composable_ref(inst.sys, m)) {
    ++v.failures;
    v.first_witness = "seed " + std::to_string(inst.seed) + " spec '" +
                      inst.spec + "': controller can block the loop";
  } else if (!loop_satisfies_ref(inst.sys, inst.preds, inst.spec, m)) {
    ++v.failures;
    v.first_witness = "seed " + std::to_string(inst.seed) + " spec '" +
                      inst.spec + "': closed loop admits a violating run";
  }
  return v;
}

OracleVerdict verify_realizability(const RandomInstance& inst,
                                   int memory_cap) {
  OracleVerdict v;
  ++v.checked;
  LtlFactory f;
  Uca spec = spec_automaton(f, inst.spec, inst.preds);
  ProductUca p = build_product(inst.sys, inst.preds, spec);
  SynthesisResult res =
      synthesize(inst.sys, inst.preds, spec, default_k_max(p, inst.sys));
  bool solver = std::holds_alternative<MealyController>(res);
  bool brute =
      exists_winning_controller_ref(inst.sys, inst.preds, inst.spec, memory_cap);
  if (solver != brute) {
    ++v.failures;
    std::ostringstream os;
    os << "seed " << inst.seed << " spec '" << inst.spec << "': ";
    if (solver)
      os << "solver returned a controller with "
         << std::get<MealyController>(res).num_memory
         << " memory states, enumeration up to " << memory_cap << " found none";
    else
      os << "solver says unrealizable, enumeration found a winning controller";
    v.first_witness = os.str();
  }
  return v;
}

RefinedPairOutcome verify_refined_pair(const RandomInstance& inst, int depth,
                                       const SelectionPolicy& pol) {
  std::mt19937_64 rng(inst.seed * 0x9e3779b97f4a7c15ULL +
                      0x2545f4914f6cdd1dULL);
  FiniteSystem abst = thicken_system(rng, inst.sys);
  EfrrRelation q = identity_relation(inst.sys);
  if (!check_sound_abstraction(inst.sys, abst, q).pass)
    throw Error("thickening lost soundness");
  LtlFactory f;
  Uca spec = spec_automaton(f, inst.spec, inst.preds);
  ProductUca p = build_product(abst, inst.preds, spec);
  SynthesisResult res =
      synthesize(abst, inst.preds, spec, default_k_max(p, abst));
  RefinedPairOutcome out;
  if (std::holds_alternative<Unrealizable>(res)) return out;
  out.realizable = true;
  out.check = check_refinement(inst.sys, abst, q,
                               std::get<MealyController>(res), depth, pol);
  return out;
}

}  // namespace abocs::oracle
