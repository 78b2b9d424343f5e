#pragma once

#include <functional>
#include <string>
#include <vector>

#include "abocs/continuous.hpp"
#include "abocs/efrr.hpp"
#include "abocs/synthesis.hpp"
#include "abocs/system.hpp"

namespace abocs {

/* Deterministic tie-breakers used when a relation image offers several
 * candidates. Any member left empty falls back to the lowest id. */
struct SelectionPolicy {
  /* abstract output chosen from gamma(y) */
  std::function<int(const IdSet&)> gamma_select;
  /* concrete input chosen from beta(uhat) */
  std::function<int(const IdSet&)> beta_select;
  /* abstract input chosen from the beta-preimage of a concrete input */
  std::function<int(const IdSet&)> input_project;
};

/* Raised when the projected prefix leaves the domain of the abstract
 * controller. Cannot happen when the relation passed the soundness check
 * and the policy picks members of the relation images; reaching it means
 * the abstraction or the policy is broken. */
struct UndefinedStrategy : Error {
  ExternalPrefix prefix;  // projected abstract prefix at the failure
  explicit UndefinedStrategy(ExternalPrefix pre)
      : Error("abstract controller undefined on the projected prefix"),
        prefix(std::move(pre)) {}
};

/* Projects a concrete external prefix to an abstract one: each output is
 * resolved through gamma, each input through the beta-preimage, both under
 * the policy. Throws ValidationError when an image or preimage is empty. */
ExternalPrefix project_omega(const ExternalPrefix& sigma,
                             const EfrrRelation& q,
                             const SelectionPolicy& pol = {});

/* Concretization of an abstract controller through a relation. The runtime
 * tracks the abstract memory state instead of re-projecting the growing
 * prefix, which is equivalent because the controller is deterministic; one
 * instance drives one simulation. */
struct RefinedController {
  MealyController mealy;
  EfrrRelation q;
  SelectionPolicy policy;
  int memory = 0;
  ExternalPrefix trace;  // projected abstract prefix seen so far
};

RefinedController make_refined(MealyController m, EfrrRelation q,
                               SelectionPolicy pol = {});

/* One feedback step: projects the measured output, advances the abstract
 * memory and returns the concrete input selected from the beta image of
 * the abstract move. Throws UndefinedStrategy when the abstract controller
 * has no move for the projected output. */
int refined_step(RefinedController& rc, int y);

/* Prefix-addressed form of the same concretization. Undefined on prefixes
 * whose inputs contradict what the controller itself would have played, so
 * closed-loop constructions see exactly the stepped behaviour. */
Strategy refined_strategy(const MealyController& m, const EfrrRelation& q,
                          const SelectionPolicy& pol = {});

enum class BranchMode { All, Random };

/* One resolved closed-loop run of a finite plant: states, inputs, outputs
 * and one predicate letter per position. */
struct FiniteTrace {
  std::vector<int> xs;
  std::vector<int> us;
  std::vector<int> ys;
  std::vector<PredMask> state_letters;
  std::vector<PredMask> input_letters;

  bool operator==(const FiniteTrace&) const = default;
  bool operator<(const FiniteTrace& o) const {
    if (xs != o.xs) return xs < o.xs;
    if (us != o.us) return us < o.us;
    if (ys != o.ys) return ys < o.ys;
    if (state_letters != o.state_letters)
      return state_letters < o.state_letters;
    return input_letters < o.input_letters;
  }
};

/* Closes the loop over a finite plant for the given number of steps.
 * BranchMode::All enumerates every resolution of the initial-state, output,
 * successor and predicate choices (exponential, meant for model checking at
 * small depth); BranchMode::Random draws one seeded trajectory. Raises
 * CompositionError where the controller is undefined or blocked. */
std::vector<FiniteTrace> simulate_closed_loop(const FiniteSystem& sys,
                                              const PredicateMaps& pm,
                                              const Strategy& ctrl, int steps,
                                              BranchMode mode,
                                              std::uint64_t seed = 0);

/* Sampled closed-loop run of a continuous plant under the refined form of
 * an abstract controller. */
struct ContinuousTrace {
  std::vector<Vec> xs;          // visited states, steps+1
  std::vector<Vec> ys;          // measured outputs, one per state
  std::vector<int> yhats;       // projected abstract outputs
  std::vector<int> us;          // abstract input ids played, steps
  std::vector<PredMask> letters;  // region letter per state
};

/* Integrates the plant for the given number of control periods with a
 * seeded disturbance signal, measuring outputs per the abstraction's output
 * mode (exact state, or state plus seeded noise within the tolerance).
 * Throws UndefinedStrategy when the projected run leaves the controller. */
ContinuousTrace simulate_closed_loop(const ControlSystem& cs,
                                     const GriddedAbstraction& ga,
                                     const MealyController& m,
                                     const std::vector<LabeledRegion>& regions,
                                     int steps, std::uint64_t seed,
                                     const SelectionPolicy& pol = {});

/* Letter of a point: one bit per region label containing it, plus the
 * out-of-range proposition when the point leaves the abstracted domain.
 * Labels must be ones the abstraction was built with. */
PredMask region_letter(const GriddedAbstraction& ga,
                       const std::vector<LabeledRegion>& regions,
                       const Vec& x);

/* Guarantees the concretized loop inherits from a sound abstraction,
 * checked exhaustively to the given depth on a related pair:
 *   (a) the closed-loop prefix sets are closed under truncation,
 *   (b) every projected closed-loop prefix is a closed-loop prefix of the
 *       abstract plant under the abstract controller,
 *   (c) every lift of a compatible run complies with the abstract dynamics
 *       along the projected prefix,
 *   (d) the refined controller is defined on every reached prefix and its
 *       move is enabled in every state of the final belief. */
struct RefinementCheck {
  bool prefix_closed = false;
  bool projections_in_loop = false;
  bool lifted_paths_comply = false;
  bool inputs_enabled = false;
  bool pass = false;
  std::string first_failure;  // empty when pass
};

RefinementCheck check_refinement(const FiniteSystem& conc,
                                 const FiniteSystem& abst,
                                 const EfrrRelation& q,
                                 const MealyController& m, int depth,
                                 const SelectionPolicy& pol = {});

/* Trace serializations. CSV has one row per position; the SVG plots the
 * first two state dimensions (or time against the state for a scalar
 * plant) with the region boxes overlaid. */
std::string trace_csv(const FiniteSystem& sys, const PredicateMaps& pm,
                      const FiniteTrace& t);
std::string trace_csv(const GriddedAbstraction& ga, const ContinuousTrace& t);
std::string trace_svg(const GriddedAbstraction& ga,
                      const std::vector<LabeledRegion>& regions,
                      const ContinuousTrace& t);

}  // namespace abocs
