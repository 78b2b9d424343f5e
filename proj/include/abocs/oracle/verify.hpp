#pragma once

#include <string>

#include "abocs/oracle/random_instance.hpp"
#include "abocs/product.hpp"
#include "abocs/refinement.hpp"
#include "abocs/synthesis.hpp"

namespace abocs::oracle {

/* Aggregated outcome of one verification drill. */
struct OracleVerdict {
  long long checked = 0;
  long long failures = 0;
  std::string first_witness;

  bool pass() const { return failures == 0; }
};

/* Cross-checks automaton acceptance of every lasso word within the given
 * shape bounds against the path-based measurements, which must obey
 *
 *   in_lang  <=>  not in_iblock  and  (not in_epaths or spec_holds).
 *
 * `replace` substitutes the automaton read on the acceptance side, so a
 * corrupted product can be shown to break the equivalence; the path side
 * is unaffected. */
OracleVerdict verify_admissibility(const RandomInstance& inst,
                                   int prefix_bound, int period_bound,
                                   const ProductUca* replace = nullptr);

/* Exhaustive feedback-composability check over the belief space: at every
 * reachable (belief, memory, output) triple the controller move must be
 * defined and enabled in each belief state. Complete rather than
 * depth-bounded, and written against the raw transition tables. */
bool composable_ref(const FiniteSystem& sys, const MealyController& m);

/* Universal model check of the closed loop against one formula drawn from
 * the random family ("G !p", "F p", "GF p", "p U q", plus the two
 * constants), by cycle analysis of the joint (state, memory) graph under
 * adversarial predicate readings. Exact for that family; throws
 * ValidationError on anything else. */
bool loop_satisfies_ref(const FiniteSystem& sys, const PredicateMaps& pm,
                        const std::string& spec, const MealyController& m);

/* Brute-force realizability: enumerates every total controller over
 * `memory_cap` memory states (which subsumes all partial controllers up to
 * that size) and reports whether some candidate is composable and
 * satisfies the formula. */
bool exists_winning_controller_ref(const FiniteSystem& sys,
                                   const PredicateMaps& pm,
                                   const std::string& spec, int memory_cap);

/* Synthesize-then-model-check drill: a returned controller must compose
 * and satisfy its formula under the reference checks above. Unrealizable
 * instances have nothing to check and pass vacuously. */
OracleVerdict verify_soundness(const RandomInstance& inst);

/* Compares the solver's verdict at its own counter bound with brute-force
 * enumeration up to `memory_cap`. */
OracleVerdict verify_realizability(const RandomInstance& inst, int memory_cap);

/* One thicken-then-relate pair: the instance system against a thickened
 * copy under the identity relation, driven by a controller synthesized on
 * the thick side. `realizable` is false when no such controller exists, in
 * which case `check` is untouched. */
struct RefinedPairOutcome {
  bool realizable = false;
  RefinementCheck check;
};
RefinedPairOutcome verify_refined_pair(const RandomInstance& inst, int depth,
                                       const SelectionPolicy& pol = {});

}  // namespace abocs::oracle
