#pragma once

#include <utility>
#include <vector>

#include "abocs/errors.hpp"
#include "abocs/ids.hpp"

namespace abocs {

/* Automaton with universal co-Buechi reading: a word is accepted iff every
 * infinite run compliant with it visits `rejecting` only finitely often;
 * runs that die are no constraint. The same structure doubles as a
 * nondeterministic Buechi automaton when `rejecting` is read as the
 * accepting set (the two readings are each other's dual). */
struct Uca {
  int num_states = 0;
  int num_letters = 0;
  IdSet initial;
  std::vector<std::vector<IdSet>> delta;  // [state][letter]
  IdSet rejecting;

  void validate() const;
  bool is_total() const;  // every (state, letter) has a successor
};

using Nba = Uca;

/* Appends one non-rejecting absorbing sink and routes every empty
 * (state, letter) cell to it. Language unchanged: runs ending in the sink
 * see no further rejecting states. */
Uca complete_uca(const Uca& a);

/* Ultimately periodic word w = prefix . period^omega, letters as ids.
 * Accepts iff no cycle of the (state, position) unraveling reachable from an
 * initial state carries a rejecting state. period must be nonempty. */
bool uca_accepts_lasso(const Uca& a, const std::vector<int>& prefix,
                       const std::vector<int>& period);

/* Buechi reading of the same structure: accepts iff some reachable cycle of
 * the unraveling carries a marked state. */
bool nba_accepts_lasso(const Nba& a, const std::vector<int>& prefix,
                       const std::vector<int>& period);

}  // namespace abocs
