#pragma once

#include <string>
#include <vector>

#include "abocs/continuous.hpp"
#include "abocs/system.hpp"

namespace abocs {

/* Relation triple between a concrete and an abstract system: state cover,
 * input concretization, output cover. The tables are total on their
 * domains; an empty image is legal here and surfaces as a checker
 * violation, not a construction error. */
struct EfrrRelation {
  std::vector<IdSet> alpha;  // concrete state -> abstract states
  std::vector<IdSet> beta;   // abstract input -> concrete inputs
  std::vector<IdSet> gamma;  // concrete output -> abstract outputs

  bool operator==(const EfrrRelation&) const = default;
};

/* Relates a system to itself one to one. */
EfrrRelation identity_relation(const FiniteSystem& sys);

/* Relational inverse, with the two systems swapping roles; the arguments
 * name the roles q was built for. */
EfrrRelation inverse_relation(const EfrrRelation& q, const FiniteSystem& conc,
                              const FiniteSystem& abst);

/* Structural fit of the relation tables to the two systems; throws
 * ValidationError on a size or range mismatch. */
void validate_relation(const FiniteSystem& conc, const FiniteSystem& abst,
                       const EfrrRelation& q);

enum class EfrrClause { InitialCover, InputEnabled, SuccessorCover, OutputCover };

const char* clause_name(EfrrClause c);

/* One failed clause instance; witness slots the clause does not use are -1 */
struct EfrrViolation {
  EfrrClause clause;
  int x = -1, xhat = -1, uhat = -1;
  bool operator==(const EfrrViolation&) const = default;
};

struct EfrrReport {
  bool pass = true;
  std::vector<EfrrViolation> violations;
  std::string render() const;
};

/* Exhaustive soundness check of the relation: covered initial states,
 * concretizable abstract inputs enabled below, successors and outputs
 * covered above. Every violated clause is reported with its witness. */
EfrrReport check_sound_abstraction(const FiniteSystem& conc,
                                   const FiniteSystem& abst,
                                   const EfrrRelation& q);

struct RealizationReport {
  EfrrReport forward, inverse;
  bool pass = false;
  std::string render() const;
};

/* Sound in both directions: the forward check plus the same check on the
 * inverted relation with the systems swapped. */
RealizationReport check_sound_realization(const FiniteSystem& conc,
                                          const FiniteSystem& abst,
                                          const EfrrRelation& q);

/* Sampling falsifier for a gridded abstraction: random disturbed steps
 * and random output measurements, checked against the two inclusions any
 * sound abstraction must satisfy. A pass is evidence, not a proof; any
 * violation is a genuine construction bug. */
struct SampledReport {
  int samples = 0;
  int violations = 0;
  std::vector<std::string> witnesses;  // first few offending samples
  bool pass = true;
  std::string render() const;
};

/* tau overrides the grid's sampling period when positive, for deliberate
 * mismatch experiments */
SampledReport check_sampled(const ControlSystem& cs,
                            const GriddedAbstraction& ga, int samples,
                            unsigned seed, double tau = 0);

}  // namespace abocs
