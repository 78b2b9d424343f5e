#include "abocs/ltl_to_uca.hpp"

#include <map>
#include <set>

namespace abocs {

void PredAlphabet::check_size() const {
  if (ap_in.size() + ap_out.size() > 12)
    throw ValidationError("predicate alphabet too large (max 12 propositions)");
}

namespace {

/* order formulas by factory id: stable across runs, unlike pointers */
struct LtlIdLess {
  bool operator()(LtlRef a, LtlRef b) const { return a->id < b->id; }
};
using LtlSet = std::set<LtlRef, LtlIdLess>;

std::vector<int> ids_of(const LtlSet& s) {
  std::vector<int> v;
  v.reserve(s.size());
  for (LtlRef f : s) v.push_back(f->id);
  return v;
}

/* classic on-the-fly tableau: nodes carry the obligations processed so far
 * (old), the obligations for the next step (next) and their predecessors */
struct TableauNode {
  LtlSet old_set, next_set;
  std::set<int> incoming;  // -1 marks the virtual initial node
};

struct Tableau {
  LtlFactory& fac;
  std::vector<TableauNode> nodes;
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> seen;

  bool literal(LtlRef f) const {
    return f->op == LtlOp::True || f->op == LtlOp::False ||
           f->op == LtlOp::Atom ||
           (f->op == LtlOp::Not && f->lhs->op == LtlOp::Atom);
  }

  void expand(LtlSet new_set, LtlSet old_set, LtlSet next_set,
              std::set<int> incoming) {
    if (new_set.empty()) {
      auto key = std::make_pair(ids_of(old_set), ids_of(next_set));
      auto it = seen.find(key);
      if (it != seen.end()) {
        nodes[it->second].incoming.insert(incoming.begin(), incoming.end());
        return;
      }
      int id = static_cast<int>(nodes.size());
      nodes.push_back(TableauNode{old_set, next_set, incoming});
      seen.emplace(key, id);
      expand(next_set, {}, {}, {id});
      return;
    }
    LtlRef f = *new_set.begin();
    new_set.erase(new_set.begin());
    if (old_set.count(f)) {
      expand(std::move(new_set), std::move(old_set), std::move(next_set),
             std::move(incoming));
      return;
    }
    auto with = [&](LtlSet s, std::initializer_list<LtlRef> add) {
      for (LtlRef g : add)
        if (!old_set.count(g)) s.insert(g);
      return s;
    };
    if (literal(f)) {
      if (f->op == LtlOp::False) return;  // contradiction, drop node
      if (f->op == LtlOp::Atom && old_set.count(fac.lnot(f))) return;
      if (f->op == LtlOp::Not && old_set.count(f->lhs)) return;
      if (f->op != LtlOp::True) old_set.insert(f);
      expand(std::move(new_set), std::move(old_set), std::move(next_set),
             std::move(incoming));
      return;
    }
    LtlSet old2 = old_set;
    old2.insert(f);
    switch (f->op) {
      case LtlOp::And:
        expand(with(new_set, {f->lhs, f->rhs}), old2, next_set, incoming);
        return;
      case LtlOp::Or:
        expand(with(new_set, {f->lhs}), old2, next_set, incoming);
        expand(with(new_set, {f->rhs}), old2, next_set, incoming);
        return;
      case LtlOp::Next: {
        LtlSet nx = next_set;
        nx.insert(f->lhs);
        expand(new_set, old2, nx, incoming);
        return;
      }
      case LtlOp::Until: {
        expand(with(new_set, {f->rhs}), old2, next_set, incoming);
        LtlSet nx = next_set;
        nx.insert(f);
        expand(with(new_set, {f->lhs}), old2, nx, incoming);
        return;
      }
      case LtlOp::Finally: {
        expand(with(new_set, {f->lhs}), old2, next_set, incoming);
        LtlSet nx = next_set;
        nx.insert(f);
        expand(new_set, old2, nx, incoming);
        return;
      }
      case LtlOp::Release: {
        expand(with(new_set, {f->lhs, f->rhs}), old2, next_set, incoming);
        LtlSet nx = next_set;
        nx.insert(f);
        expand(with(new_set, {f->rhs}), old2, nx, incoming);
        return;
      }
      case LtlOp::Globally: {
        LtlSet nx = next_set;
        nx.insert(f);
        expand(with(new_set, {f->lhs}), old2, nx, incoming);
        return;
      }
      default:
        throw Error("tableau: formula not in negation normal form");
    }
  }
};

/* does the node's literal constraint allow this letter */
bool letter_fits(const LtlSet& old_set, const PredAlphabet& ab, int letter) {
  for (LtlRef f : old_set) {
    bool neg = f->op == LtlOp::Not;
    LtlRef at = neg ? f->lhs : f;
    if (at->op != LtlOp::Atom) continue;
    PredMask m = at->input_ap ? ab.in_of(letter) : ab.out_of(letter);
    bool val = (m >> at->atom) & 1;
    if (val == neg) return false;
  }
  return true;
}

/* pending eventualities: one accepting set per Until/Finally subformula */
std::vector<LtlRef> collect_eventualities(const std::vector<TableauNode>& ns) {
  LtlSet evs;
  for (const auto& n : ns)
    for (LtlRef f : n.old_set)
      if (f->op == LtlOp::Until || f->op == LtlOp::Finally) evs.insert(f);
  return {evs.begin(), evs.end()};
}

bool satisfies_eventuality(const TableauNode& n, LtlRef ev) {
  LtlRef goal = ev->op == LtlOp::Until ? ev->rhs : ev->lhs;
  if (!n.old_set.count(ev)) return true;
  if (goal->op == LtlOp::True) return true;
  return n.old_set.count(goal) != 0;
}

}  // namespace

Nba ltl_to_nba(LtlFactory& fac, LtlRef f, const PredAlphabet& ab) {
  ab.check_size();
  LtlRef g = simplify(fac, nnf(fac, f));
  Tableau tb{fac, {}, {}};
  if (g->op != LtlOp::False) tb.expand({g}, {}, {}, {-1});

  const int tn = static_cast<int>(tb.nodes.size());
  std::vector<LtlRef> evs = collect_eventualities(tb.nodes);
  const int m = evs.empty() ? 1 : static_cast<int>(evs.size());

  // degeneralization over (tableau node, pending index) plus a fresh initial
  // state; the pending index advances when the source discharges its
  // eventuality, and a full sweep marks acceptance
  Nba a;
  a.num_letters = ab.num_letters();
  auto idx = [&](int node, int j) { return 1 + node * m + j; };
  a.num_states = 1 + tn * m;
  a.initial = {0};
  a.delta.assign(a.num_states, std::vector<IdSet>(a.num_letters, IdSet{}));

  auto advance = [&](int node, int j) {
    if (evs.empty()) return 0;
    return satisfies_eventuality(tb.nodes[node], evs[j]) ? (j + 1) % m : j;
  };

  for (int t = 0; t < tn; ++t) {
    const TableauNode& n = tb.nodes[t];
    for (int l = 0; l < a.num_letters; ++l) {
      if (!letter_fits(n.old_set, ab, l)) continue;
      for (int src : n.incoming) {
        if (src == -1) {
          a.delta[0][l].insert(idx(t, 0));
        } else {
          for (int j = 0; j < m; ++j)
            a.delta[idx(src, j)][l].insert(idx(t, advance(src, j)));
        }
      }
    }
  }
  for (int t = 0; t < tn; ++t) {
    int j = m - 1;
    if (evs.empty() || satisfies_eventuality(tb.nodes[t], evs[j]))
      a.rejecting.insert(idx(t, j));
  }
  a.validate();
  return a;
}

Uca ltl_to_uca(LtlFactory& fac, LtlRef f, const PredAlphabet& ab) {
  Nba neg = ltl_to_nba(fac, fac.lnot(f), ab);
  // universal reinterpretation: every run must visit the tableau's
  // accepting set only finitely often
  return complete_uca(neg);
}

}  // namespace abocs
