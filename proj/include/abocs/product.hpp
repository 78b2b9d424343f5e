#pragma once

#include <utility>
#include <vector>

#include "abocs/system.hpp"
#include "abocs/uca.hpp"

namespace abocs {

struct ProductOptions {
  /* read state predicates of every state consistent with the observed
   * output instead of the tracked state's own predicates */
  bool output_anchored_preds = false;
  /* model input blocking through an absorbing rejected state */
  bool track_blocking = true;
  /* restrict to states reachable from the initial set */
  bool prune = true;
};

/* Synthesis automaton over letters (output, input): the system tracked
 * jointly with the specification automaton, plus one absorbing `blocked`
 * state entered exactly when the observed output is possible but the played
 * input is disabled. Universal co-Buechi reading: a sequence is admissible
 * iff no tracked run blocks or violates the specification. */
struct ProductUca {
  Uca uca;  // letter = y * num_inputs + u
  int num_outputs = 0;
  int num_inputs = 0;
  std::vector<std::pair<int, int>> origin;  // state -> (system, spec) state
  int blocked = -1;  // id of the absorbing state, -1 if absent

  int letter(int y, int u) const { return y * num_inputs + u; }
};

ProductUca build_product(const FiniteSystem& sys, const PredicateMaps& pm,
                         const Uca& spec, const ProductOptions& opt = {});

/* Ultimately periodic external sequence as (output, input) pairs. */
struct YuLasso {
  std::vector<std::pair<int, int>> prefix, period;
};

/* Independent semantic measurements of one external sequence: product
 * membership, external consistency, input blocking, and whether every
 * predicate reading of every compliant internal path satisfies the
 * specification. Pure observation; the measurements are compared against
 * each other elsewhere. */
struct SemanticsRecord {
  bool in_lang = false;
  bool in_epaths = false;
  bool in_iblock = false;
  bool spec_holds = false;
};

SemanticsRecord iblock_semantics_check(const FiniteSystem& sys,
                                       const PredicateMaps& pm,
                                       const Uca& spec, const YuLasso& w);

}  // namespace abocs
