#pragma once

#include <random>
#include <string>

#include "abocs/system.hpp"

namespace abocs::oracle {

/* One size table for every randomized suite; suites override fields before
 * drawing. Kept small on purpose: the reference algorithms are exponential. */
struct SizeCaps {
  int max_states = 5;
  int max_inputs = 2;
  int max_outputs = 2;
  int num_aps = 1;          // state propositions p, q, ...
  int lasso_prefix = 3;     // longest stem enumerated
  int lasso_period = 3;     // longest period enumerated
  int mealy_cap = 3;        // brute-force controller memory bound
  double trans_density = 0.8;
};

struct RandomInstance {
  std::uint64_t seed = 0;
  FiniteSystem sys;
  PredicateMaps preds;
  std::string spec;  // formula text over the instance's propositions
};

/* Seeded system + predicate maps. Shapes are drawn first, then contents, so
 * equal seeds give identical instances across runs and platforms. */
RandomInstance random_instance(std::uint64_t seed, const SizeCaps& caps);

/* System only, for suites that bring their own predicates. */
FiniteSystem random_system(std::mt19937_64& rng, const SizeCaps& caps);

PredicateMaps random_predicates(std::mt19937_64& rng, const FiniteSystem& sys,
                                int num_aps);

/* Uniform pick from the fixed specification family used by the randomized
 * suites; formulas mention only propositions present in the instance. */
std::string random_spec(std::mt19937_64& rng, int num_aps);

/* Superset copy over the same alphabets: extra successors on cells that
 * already have one, extra outputs, occasionally extra initial states. The
 * identity relation then relates the original to the copy soundly. */
FiniteSystem thicken_system(std::mt19937_64& rng, const FiniteSystem& sys);

}  // namespace abocs::oracle
