#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abocs/errors.hpp"
#include "abocs/ids.hpp"

namespace abocs {

/* Finite transition system with set-valued dynamics and a set-valued output
 * map. The only structural requirement is that every state has at least one
 * output; transitions may be partial (an input can be disabled in a state)
 * and the dynamics may be non-deterministic. */
struct FiniteSystem {
  SymbolTable states;
  SymbolTable inputs;
  SymbolTable outputs;
  IdSet initial;
  std::vector<std::vector<IdSet>> trans;  // [state][input] -> successor set
  std::vector<IdSet> out;                 // [state] -> output set, nonempty

  int num_states() const { return states.size(); }
  int num_inputs() const { return inputs.size(); }
  int num_outputs() const { return outputs.size(); }

  const IdSet& successors(int x, int u) const { return trans[x][u]; }

  /* inputs with at least one successor at x */
  IdSet enabled(int x) const {
    IdSet e;
    for (int u = 0; u < num_inputs(); ++u)
      if (!trans[x][u].empty()) e.insert(u);
    return e;
  }

  void validate() const;
};

/* Predicate maps attach sets of atomic propositions to states and inputs.
 * A letter is one truth assignment, encoded as a bit mask over the
 * proposition table; the maps are set-valued, so a state (or input) may
 * offer several letters. */
using PredMask = std::uint32_t;

struct PredicateMaps {
  SymbolTable ap_in;   // propositions read off inputs
  SymbolTable ap_out;  // propositions read off states
  std::vector<std::vector<PredMask>> state_preds;  // [state] -> sorted letters
  std::vector<std::vector<PredMask>> input_preds;  // [input] -> sorted letters

  void validate(const FiniteSystem& sys) const;
};

/* External prefix y0 u0 y1 ... u_{k-1} y_k: one more output than inputs. */
struct ExternalPrefix {
  std::vector<int> ys;
  std::vector<int> us;

  int steps() const { return static_cast<int>(us.size()); }
  bool operator==(const ExternalPrefix&) const = default;
  bool operator<(const ExternalPrefix& o) const {
    if (ys != o.ys) return ys < o.ys;
    return us < o.us;
  }
};

using Belief = IdSet;

/* A run prefix x0 u0 x1 ... (one more state than inputs). */
struct Path {
  std::vector<int> xs;
  std::vector<int> us;
  bool operator==(const Path&) const = default;
  bool operator<(const Path& o) const {
    if (xs != o.xs) return xs < o.xs;
    return us < o.us;
  }
};

/* One predicate reading of a run prefix: a state letter per state and an
 * input letter per input. */
struct PredSeq {
  std::vector<PredMask> state_letters;
  std::vector<PredMask> input_letters;
  bool operator==(const PredSeq&) const = default;
  bool operator<(const PredSeq& o) const {
    if (state_letters != o.state_letters) return state_letters < o.state_letters;
    return input_letters < o.input_letters;
  }
};

/* Inputs enabled in every state of the set. Empty set yields the full input
 * set (neutral element of the intersection). */
IdSet enab_set(const FiniteSystem& sys, const Belief& b);

/* One belief step: states reachable from b under u whose output set
 * contains y. */
Belief belief_update(const FiniteSystem& sys, const Belief& b, int u, int y);

/* Beliefs after the first observation, keyed by output. Outputs no initial
 * state can emit are absent. */
std::map<int, Belief> initial_beliefs(const FiniteSystem& sys);

/* Belief at the end of an external prefix; empty iff the prefix is not an
 * external prefix of sys. */
Belief last_belief(const FiniteSystem& sys, const ExternalPrefix& pre);

/* True iff prefix is an external prefix of sys and u is not enabled in every
 * state of its final belief: feeding u after prefix can block. */
bool iblock_prefix(const FiniteSystem& sys, const ExternalPrefix& pre, int u);

/* All run prefixes of maximal paths, up to depth inputs. A shorter prefix
 * appears only when its final state has every input disabled. Exponential;
 * reference use only. */
std::vector<Path> enumerate_paths(const FiniteSystem& sys, int depth);

/* All predicate readings of a run prefix, in lexicographic order. */
std::vector<PredSeq> generate_predicates(const PredicateMaps& pm,
                                         const Path& path);

/* Output-feedback strategy: maps an external prefix to the input to play,
 * or nothing where undefined. */
using Strategy = std::function<std::optional<int>(const ExternalPrefix&)>;

/* Raised when a strategy breaks feedback composability. */
struct CompositionError : Error {
  enum class Reason { Undefined, NotEnabled };
  ExternalPrefix prefix;
  Reason reason;
  CompositionError(ExternalPrefix pre, Reason r)
      : Error(r == Reason::Undefined
                  ? "strategy undefined on a reachable prefix"
                  : "strategy plays an input not enabled under the belief"),
        prefix(std::move(pre)),
        reason(r) {}
};

/* Level-k closed-loop external prefixes of sys under ctrl, built by the
 * iterative construction; raises CompositionError if ctrl is undefined or
 * plays a non-enabled input at any reached prefix of level < k. */
std::vector<ExternalPrefix> closed_loop_prefixes(const FiniteSystem& sys,
                                                 const Strategy& ctrl, int k);

}  // namespace abocs
