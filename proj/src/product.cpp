#include "abocs/product.hpp"

#include <map>
#include <set>

#include "abocs/graph.hpp"

namespace abocs {

namespace {

void check_alphabet(const PredicateMaps& pm, const Uca& spec) {
  int want = 1 << (pm.ap_in.size() + pm.ap_out.size());
  if (spec.num_letters != want)
    throw AlphabetMismatchError(
        "specification alphabet has " + std::to_string(spec.num_letters) +
        " letters, predicate maps need " + std::to_string(want));
}

/* union of spec successors over every predicate reading (mu, lambda) */
IdSet spec_succs(const Uca& spec, const PredicateMaps& pm, int q, int u,
                 const std::vector<PredMask>& state_letters) {
  IdSet r;
  for (PredMask mu : pm.input_preds[u]) {
    for (PredMask lam : state_letters) {
      int l = (static_cast<int>(mu) << pm.ap_out.size()) |
              static_cast<int>(lam);
      r = set_union(r, spec.delta[q][l]);
    }
  }
  return r;
}

/* state letters read when output y is observed in state x */
const std::vector<PredMask>& anchor_letters(
    const PredicateMaps& pm, const std::vector<std::vector<PredMask>>& by_out,
    bool output_anchored, int x, int y) {
  return output_anchored ? by_out[y] : pm.state_preds[x];
}

std::vector<std::vector<PredMask>> letters_by_output(
    const FiniteSystem& sys, const PredicateMaps& pm) {
  std::vector<std::vector<PredMask>> by_out(sys.num_outputs());
  for (int y = 0; y < sys.num_outputs(); ++y) {
    std::set<PredMask> acc;
    for (int x = 0; x < sys.num_states(); ++x)
      if (sys.out[x].contains(y))
        acc.insert(pm.state_preds[x].begin(), pm.state_preds[x].end());
    by_out[y].assign(acc.begin(), acc.end());
  }
  return by_out;
}

}  // namespace

ProductUca build_product(const FiniteSystem& sys, const PredicateMaps& pm,
                         const Uca& spec, const ProductOptions& opt) {
  sys.validate();
  pm.validate(sys);
  spec.validate();
  check_alphabet(pm, spec);
  if (!spec.is_total())
    throw ValidationError("specification automaton must be complete");

  const int nx = sys.num_states(), nq = spec.num_states;
  const int ny = sys.num_outputs(), nu = sys.num_inputs();
  auto by_out = opt.output_anchored_preds
                    ? letters_by_output(sys, pm)
                    : std::vector<std::vector<PredMask>>{};

  ProductUca p;
  p.num_outputs = ny;
  p.num_inputs = nu;
  p.uca.num_letters = ny * nu;
  p.uca.num_states = nx * nq + (opt.track_blocking ? 1 : 0);
  p.blocked = opt.track_blocking ? nx * nq : -1;
  p.uca.delta.assign(p.uca.num_states,
                     std::vector<IdSet>(p.uca.num_letters, IdSet{}));
  auto pair_id = [nq](int x, int q) { return x * nq + q; };

  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      if (!sys.out[x].contains(y)) continue;
      for (int u = 0; u < nu; ++u) {
        int l = p.letter(y, u);
        const IdSet& xsucc = sys.trans[x][u];
        if (xsucc.empty()) {
          if (opt.track_blocking)
            for (int q = 0; q < nq; ++q)
              p.uca.delta[pair_id(x, q)][l].insert(p.blocked);
          continue;
        }
        const std::vector<PredMask>& lam =
            anchor_letters(pm, by_out, opt.output_anchored_preds, x, y);
        for (int q = 0; q < nq; ++q) {
          IdSet qsucc = spec_succs(spec, pm, q, u, lam);
          IdSet& cell = p.uca.delta[pair_id(x, q)][l];
          for (int x2 : xsucc)
            for (int q2 : qsucc) cell.insert(pair_id(x2, q2));
        }
      }
    }
  }
  if (opt.track_blocking)
    for (int l = 0; l < p.uca.num_letters; ++l)
      p.uca.delta[p.blocked][l].insert(p.blocked);

  for (int x : sys.initial)
    for (int q0 : spec.initial) p.uca.initial.insert(pair_id(x, q0));
  for (int x = 0; x < nx; ++x)
    for (int q : spec.rejecting) p.uca.rejecting.insert(pair_id(x, q));
  if (opt.track_blocking) p.uca.rejecting.insert(p.blocked);

  p.origin.assign(p.uca.num_states, {-1, -1});
  for (int x = 0; x < nx; ++x)
    for (int q = 0; q < nq; ++q) p.origin[pair_id(x, q)] = {x, q};

  if (opt.prune) {
    std::vector<char> seen(p.uca.num_states, 0);
    std::vector<int> todo;
    for (int s : p.uca.initial) {
      seen[s] = 1;
      todo.push_back(s);
    }
    while (!todo.empty()) {
      int s = todo.back();
      todo.pop_back();
      for (const IdSet& cell : p.uca.delta[s])
        for (int s2 : cell)
          if (!seen[s2]) {
            seen[s2] = 1;
            todo.push_back(s2);
          }
    }
    std::vector<int> remap(p.uca.num_states, -1);
    int next = 0;
    for (int s = 0; s < p.uca.num_states; ++s)
      if (seen[s]) remap[s] = next++;

    ProductUca q;
    q.num_outputs = ny;
    q.num_inputs = nu;
    q.uca.num_states = next;
    q.uca.num_letters = p.uca.num_letters;
    q.uca.delta.assign(next, std::vector<IdSet>(q.uca.num_letters, IdSet{}));
    q.origin.assign(next, {-1, -1});
    q.blocked = p.blocked >= 0 && seen[p.blocked] ? remap[p.blocked] : -1;
    for (int s = 0; s < p.uca.num_states; ++s) {
      if (!seen[s]) continue;
      q.origin[remap[s]] = p.origin[s];
      for (int l = 0; l < p.uca.num_letters; ++l)
        for (int s2 : p.uca.delta[s][l])
          q.uca.delta[remap[s]][l].insert(remap[s2]);
    }
    for (int s : p.uca.initial) q.uca.initial.insert(remap[s]);
    for (int s : p.uca.rejecting)
      if (seen[s]) q.uca.rejecting.insert(remap[s]);
    p = std::move(q);
  }
  p.uca.validate();
  return p;
}

namespace {

struct LassoView {
  const YuLasso& w;
  int p, total;

  LassoView(const YuLasso& w_)
      : w(w_),
        p(static_cast<int>(w_.prefix.size())),
        total(static_cast<int>(w_.prefix.size() + w_.period.size())) {
    if (w_.period.empty())
      throw ValidationError("lasso period must be nonempty");
  }
  std::pair<int, int> at(int i) const {
    return i < p ? w.prefix[i] : w.period[i - p];
  }
  int next(int i) const { return i + 1 < total ? i + 1 : p; }
};

/* all compliant beliefs are eventually periodic; walk until the
 * (position, belief) pair repeats */
void belief_measurements(const FiniteSystem& sys, const LassoView& v,
                         SemanticsRecord& rec) {
  rec.in_epaths = true;
  rec.in_iblock = false;
  Belief b;
  auto first = initial_beliefs(sys);
  auto it = first.find(v.at(0).first);
  if (it != first.end()) b = it->second;
  std::set<std::pair<int, Belief>> seen;
  int pos = 0;
  while (seen.insert({pos, b}).second) {
    if (b.empty()) {
      rec.in_epaths = false;
      return;  // empty beliefs stay empty
    }
    auto [y, u] = v.at(pos);
    if (!enab_set(sys, b).contains(u)) rec.in_iblock = true;
    int npos = v.next(pos);
    b = belief_update(sys, b, u, v.at(npos).first);
    pos = npos;
  }
}

/* Every predicate reading of every compliant internal path must satisfy the
 * specification. Exact check: a violation exists iff the joint unraveling
 * of (system state, spec state, position) reaches a cycle through a
 * rejecting spec state. */
bool spec_holds_on(const FiniteSystem& sys, const PredicateMaps& pm,
                   const Uca& spec, const LassoView& v) {
  const int nq = spec.num_states;
  const int total = v.total;
  auto node = [&](int x, int q, int pos) { return (x * nq + q) * total + pos; };
  int num_nodes = sys.num_states() * nq * total;

  auto succs = [&](int n, std::vector<int>& out) {
    int pos = n % total;
    int q = (n / total) % nq;
    int x = n / (total * nq);
    auto [y, u] = v.at(pos);
    if (!sys.out[x].contains(y)) return;
    int npos = v.next(pos);
    int ny = v.at(npos).first;
    IdSet qsucc = spec_succs(spec, pm, q, u, pm.state_preds[x]);
    for (int x2 : sys.trans[x][u]) {
      if (!sys.out[x2].contains(ny)) continue;
      for (int q2 : qsucc) out.push_back(node(x2, q2, npos));
    }
  };
  std::vector<int> roots;
  for (int x : sys.initial)
    if (sys.out[x].contains(v.at(0).first))
      for (int q0 : spec.initial) roots.push_back(node(x, q0, 0));
  auto marked = [&](int n) {
    return spec.rejecting.contains((n / total) % nq);
  };
  return !reachable_marked_cycle(num_nodes, succs, roots, marked);
}

}  // namespace

SemanticsRecord iblock_semantics_check(const FiniteSystem& sys,
                                       const PredicateMaps& pm,
                                       const Uca& spec, const YuLasso& w) {
  LassoView v(w);
  SemanticsRecord rec;

  ProductUca p = build_product(sys, pm, spec);
  std::vector<int> prefix, period;
  for (auto [y, u] : w.prefix) prefix.push_back(p.letter(y, u));
  for (auto [y, u] : w.period) period.push_back(p.letter(y, u));
  rec.in_lang = uca_accepts_lasso(p.uca, prefix, period);

  belief_measurements(sys, v, rec);
  rec.spec_holds = spec_holds_on(sys, pm, spec, v);
  return rec;
}

}  // namespace abocs
