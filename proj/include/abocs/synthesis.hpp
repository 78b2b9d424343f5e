#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "abocs/product.hpp"
#include "abocs/system.hpp"

namespace abocs {

/* Counter profile of one game node: sorted (product state, visits) pairs.
 * A state that is absent carries no compliant run. Visits count entries
 * into the rejecting set, the initial state included, and stay ≤ k on every
 * safe node; the single overflow sink uses the sentinel {(-1, k+1)}. */
using CounterFunction = std::vector<std::pair<int, int>>;

/* Turn-based safety game: at an observation node the environment picks an
 * output, then the system answers with an input, moving to the successor
 * observation node. System nodes are kept implicit as (node, output) pairs.
 * Node 0 is initial; the overflow sink, if reachable, is absorbing and has
 * no expanded successors. */
struct SafetyGame {
  int k = 0;
  int num_outputs = 0;
  int num_inputs = 0;
  std::vector<CounterFunction> nodes;
  std::vector<std::vector<std::vector<int>>> succ;  // [node][y][u] -> node
  std::vector<char> unsafe;                         // per node
};

SafetyGame kcounter_game(const ProductUca& p, int k);

struct SafetySolution {
  bool winning = false;
  /* nodes from which the environment can force a counter past the bound */
  std::vector<char> lost;
  /* [node][y] -> inputs answering y that keep the play winnable; filled
   * only at nodes that are not lost */
  std::vector<std::vector<IdSet>> permissive;
};

SafetySolution solve_safety(const SafetyGame& g);

/* Deterministic finite-memory output-feedback controller. Steps left
 * undefined are never exercised by the closed loop the controller was
 * built for. */
struct MealyController {
  SymbolTable outputs;
  SymbolTable inputs;
  int num_memory = 0;
  int initial = 0;
  /* [memory][output] -> (input, next memory) */
  std::vector<std::vector<std::optional<std::pair<int, int>>>> step;

  std::optional<std::pair<int, int>> act(int z, int y) const {
    if (z < 0 || z >= num_memory) return std::nullopt;
    if (y < 0 || y >= outputs.size()) return std::nullopt;
    return step[z][y];
  }

  void validate() const;

  bool operator==(const MealyController&) const = default;
};

struct Unrealizable {
  int k_max = 0;
};

struct SynthesisOptions {
  /* Solve via an antichain of maximal winning counter profiles instead of
   * the explicit game graph. Same verdict and controller, tested as such. */
  bool antichain = false;
};

using SynthesisResult = std::variant<MealyController, Unrealizable>;

/* Tries k = 0..k_max and extracts a controller from the first winning
 * bound: per reachable (node, output) the lowest permissive input id,
 * memory restricted to what the closed loop with sys can reach. po shapes
 * the underlying product (predicate anchoring, blocking, pruning). */
SynthesisResult synthesize(const FiniteSystem& sys, const PredicateMaps& pm,
                           const Uca& spec, int k_max,
                           const SynthesisOptions& opt = {},
                           const ProductOptions& po = {});

/* Heuristic bound cap: |rejecting| times |states|. */
inline int default_k_max(const ProductUca& p, const FiniteSystem& sys) {
  return static_cast<int>(p.uca.rejecting.size()) * sys.num_states();
}

/* Replays the memory along the prefix; undefined once the prefix leaves
 * the controller's defined steps or contradicts its own past choices. */
Strategy induced_strategy(const MealyController& m);

/* Model check of the loop closed over the product: no reachable undefined
 * step, and no cycle through a rejecting product state. */
bool closed_loop_satisfies(const ProductUca& p, const MealyController& m);

}  // namespace abocs
