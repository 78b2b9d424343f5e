#pragma once

#include <vector>

#include "abocs/ltl.hpp"
#include "abocs/system.hpp"

namespace abocs::oracle {

/* Truth-assignment positions of an ultimately periodic word: prefix then
 * period, each position one (input mask, state mask) pair. */
struct ValLasso {
  std::vector<std::pair<PredMask, PredMask>> prefix;
  std::vector<std::pair<PredMask, PredMask>> period;
};

/* Reference semantics: evaluates the formula over the lasso by fixpoint
 * iteration per subformula, no automata involved. */
bool ltl_ref_holds(LtlRef f, const ValLasso& w);

}  // namespace abocs::oracle
