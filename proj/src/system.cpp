#include "abocs/system.hpp"

#include <algorithm>

namespace abocs {

void FiniteSystem::validate() const {
  if (num_states() == 0) throw ValidationError("system has no states");
  if (num_inputs() == 0) throw ValidationError("system has no inputs");
  if (num_outputs() == 0) throw ValidationError("system has no outputs");
  if (initial.empty()) throw ValidationError("system has no initial state");
  for (int x : initial)
    if (x < 0 || x >= num_states())
      throw ValidationError("initial state id out of range");
  if (static_cast<int>(trans.size()) != num_states())
    throw ValidationError("transition table size mismatch");
  for (int x = 0; x < num_states(); ++x) {
    if (static_cast<int>(trans[x].size()) != num_inputs())
      throw ValidationError("transition row size mismatch at state " +
                            states.name(x));
    for (int u = 0; u < num_inputs(); ++u)
      for (int x2 : trans[x][u])
        if (x2 < 0 || x2 >= num_states())
          throw ValidationError("successor id out of range");
  }
  if (static_cast<int>(out.size()) != num_states())
    throw ValidationError("output table size mismatch");
  for (int x = 0; x < num_states(); ++x) {
    if (out[x].empty())
      throw ValidationError("state " + states.name(x) + " has no output");
    for (int y : out[x])
      if (y < 0 || y >= num_outputs())
        throw ValidationError("output id out of range");
  }
}

void PredicateMaps::validate(const FiniteSystem& sys) const {
  if (static_cast<int>(state_preds.size()) != sys.num_states())
    throw ValidationError("state predicate table size mismatch");
  if (static_cast<int>(input_preds.size()) != sys.num_inputs())
    throw ValidationError("input predicate table size mismatch");
  PredMask out_full = ap_out.size() >= 32 ? ~PredMask(0)
                                          : (PredMask(1) << ap_out.size()) - 1;
  PredMask in_full =
      ap_in.size() >= 32 ? ~PredMask(0) : (PredMask(1) << ap_in.size()) - 1;
  for (const auto& ls : state_preds) {
    if (ls.empty()) throw ValidationError("state with no predicate letter");
    if (!std::is_sorted(ls.begin(), ls.end()))
      throw ValidationError("state letters not sorted");
    for (PredMask m : ls)
      if (m & ~out_full) throw ValidationError("state letter uses unknown ap");
  }
  for (const auto& ls : input_preds) {
    if (ls.empty()) throw ValidationError("input with no predicate letter");
    if (!std::is_sorted(ls.begin(), ls.end()))
      throw ValidationError("input letters not sorted");
    for (PredMask m : ls)
      if (m & ~in_full) throw ValidationError("input letter uses unknown ap");
  }
}

IdSet enab_set(const FiniteSystem& sys, const Belief& b) {
  if (b.empty()) return IdSet::range(sys.num_inputs());
  IdSet e = sys.enabled(b.front());
  for (int x : b) {
    if (e.empty()) break;
    e = set_intersect(e, sys.enabled(x));
  }
  return e;
}

Belief belief_update(const FiniteSystem& sys, const Belief& b, int u, int y) {
  Belief next;
  for (int x : b)
    for (int x2 : sys.trans[x][u])
      if (sys.out[x2].contains(y)) next.insert(x2);
  return next;
}

std::map<int, Belief> initial_beliefs(const FiniteSystem& sys) {
  std::map<int, Belief> m;
  for (int x : sys.initial)
    for (int y : sys.out[x]) m[y].insert(x);
  return m;
}

Belief last_belief(const FiniteSystem& sys, const ExternalPrefix& pre) {
  if (pre.ys.size() != pre.us.size() + 1)
    throw ValidationError("malformed external prefix");
  Belief b;
  for (int x : sys.initial)
    if (sys.out[x].contains(pre.ys[0])) b.insert(x);
  for (std::size_t k = 0; k < pre.us.size(); ++k) {
    if (b.empty()) return b;
    b = belief_update(sys, b, pre.us[k], pre.ys[k + 1]);
  }
  return b;
}

bool iblock_prefix(const FiniteSystem& sys, const ExternalPrefix& pre, int u) {
  Belief b = last_belief(sys, pre);
  if (b.empty()) return false;
  return !enab_set(sys, b).contains(u);
}

namespace {

void extend_paths(const FiniteSystem& sys, Path& cur, int depth,
                  std::vector<Path>& outp) {
  if (static_cast<int>(cur.us.size()) == depth) {
    outp.push_back(cur);
    return;
  }
  int x = cur.xs.back();
  bool dead = true;
  for (int u = 0; u < sys.num_inputs(); ++u) {
    const IdSet& succ = sys.trans[x][u];
    if (succ.empty()) continue;
    dead = false;
    for (int x2 : succ) {
      cur.us.push_back(u);
      cur.xs.push_back(x2);
      extend_paths(sys, cur, depth, outp);
      cur.xs.pop_back();
      cur.us.pop_back();
    }
  }
  if (dead) outp.push_back(cur);  // maximal short path
}

}  // namespace

std::vector<Path> enumerate_paths(const FiniteSystem& sys, int depth) {
  std::vector<Path> res;
  for (int x0 : sys.initial) {
    Path p;
    p.xs.push_back(x0);
    extend_paths(sys, p, depth, res);
  }
  std::sort(res.begin(), res.end());
  return res;
}

std::vector<PredSeq> generate_predicates(const PredicateMaps& pm,
                                         const Path& path) {
  std::vector<PredSeq> res;
  PredSeq cur;
  // lexicographic product over per-position letter choices, states first
  std::function<void(std::size_t)> rec_in = [&](std::size_t i) {
    if (i == path.us.size()) {
      res.push_back(cur);
      return;
    }
    for (PredMask m : pm.input_preds[path.us[i]]) {
      cur.input_letters.push_back(m);
      rec_in(i + 1);
      cur.input_letters.pop_back();
    }
  };
  std::function<void(std::size_t)> rec_st = [&](std::size_t i) {
    if (i == path.xs.size()) {
      rec_in(0);
      return;
    }
    for (PredMask m : pm.state_preds[path.xs[i]]) {
      cur.state_letters.push_back(m);
      rec_st(i + 1);
      cur.state_letters.pop_back();
    }
  };
  rec_st(0);
  std::sort(res.begin(), res.end());
  return res;
}

std::vector<ExternalPrefix> closed_loop_prefixes(const FiniteSystem& sys,
                                                 const Strategy& ctrl, int k) {
  struct Node {
    ExternalPrefix pre;
    Belief belief;
  };
  std::vector<Node> level;
  for (const auto& [y, b] : initial_beliefs(sys)) {
    Node n;
    n.pre.ys.push_back(y);
    n.belief = b;
    level.push_back(std::move(n));
  }
  for (int step = 0; step < k; ++step) {
    std::vector<Node> next;
    for (const Node& n : level) {
      std::optional<int> u = ctrl(n.pre);
      if (!u)
        throw CompositionError(n.pre, CompositionError::Reason::Undefined);
      if (!enab_set(sys, n.belief).contains(*u))
        throw CompositionError(n.pre, CompositionError::Reason::NotEnabled);
      for (int y = 0; y < sys.num_outputs(); ++y) {
        Belief b2 = belief_update(sys, n.belief, *u, y);
        if (b2.empty()) continue;
        Node n2;
        n2.pre = n.pre;
        n2.pre.us.push_back(*u);
        n2.pre.ys.push_back(y);
        n2.belief = std::move(b2);
        next.push_back(std::move(n2));
      }
    }
    level = std::move(next);
  }
  std::vector<ExternalPrefix> res;
  res.reserve(level.size());
  for (auto& n : level) res.push_back(std::move(n.pre));
  std::sort(res.begin(), res.end());
  return res;
}

}  // namespace abocs
