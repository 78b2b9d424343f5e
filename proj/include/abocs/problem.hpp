#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "abocs/continuous.hpp"
#include "abocs/efrr.hpp"
#include "abocs/ltl.hpp"
#include "abocs/product.hpp"
#include "abocs/synthesis.hpp"
#include "abocs/system_io.hpp"
#include "abocs/uca.hpp"

namespace abocs {

/* A problem file bundles one model with one objective. Structured text in
 * the same dialect as the system format: [section] headers, '#' comments,
 * plus `key = value` rows where a value is a number, a quoted string, a
 * boolean, or a bracketed list of values.
 *
 * Model sections, exactly one of:
 *   [system]  file = "plant.sys"           finite plant, external file
 *   [plant]   dim, a, b, inputs, dist,     linear field dx = A x + B u
 *             init?, growth?               growth defaults to |A| entrywise
 * A [plant] needs a [grid] (theta, eta, tau, rk_steps?, mode?, out_eta?,
 * eps?) and takes any number of [region.<label>] sections, each with a
 * `boxes` list; region labels become state propositions.
 *
 * Objective: [spec] with either `formula = "..."` or `hoa = "spec.hoa"`.
 * Optional [synthesis]: k_max, antichain, output_anchored. */

struct FiniteProblem {
  SystemFile model;
};

struct ContinuousProblem {
  ControlSystem plant;
  GridSpec grid;
  std::vector<LabeledRegion> regions;
};

struct Problem {
  std::variant<FiniteProblem, ContinuousProblem> model;
  std::string formula;   // objective text; empty when an automaton is given
  std::string hoa_path;  // resolved automaton path, or empty
  int k_max = -1;        // counter bound; negative derives the default cap
  SynthesisOptions synth;
  ProductOptions product;

  bool continuous() const {
    return std::holds_alternative<ContinuousProblem>(model);
  }
};

/* Relative paths inside the text resolve against base_dir. */
Problem parse_problem(const std::string& text, const std::string& base_dir);
Problem load_problem(const std::string& path);

/* Finite view of the model: the plant itself, or its grid abstraction. */
struct CompiledModel {
  SystemFile model;
  std::optional<GriddedAbstraction> grid;
};
CompiledModel compile_model(const Problem& p, int jobs = 1);

/* The objective actually enforced. Continuous problems also rule out the
 * overflow proposition unless the formula mentions it already. */
std::string effective_formula(const Problem& p);

/* Objective automaton over the model's proposition tables, either compiled
 * from the formula or imported from the referenced automaton file. An
 * imported automaton must name the propositions in letter-bit order. */
Uca compile_spec(LtlFactory& f, const Problem& p, const PredicateMaps& pm);

/* Proposition names in letter-bit order: state propositions on the low
 * bits, input propositions above them. */
std::vector<std::string> letter_aps(const PredicateMaps& pm);

/* Deterministic description of a gridded abstraction: the grid, the input
 * representatives, and the cell and output geometry. Pairs with the
 * serialized finite system to make a reviewable bundle. */
std::string serialize_abstraction(const GriddedAbstraction& ga);

/* Relation tables as structured text: sections [alpha], [beta], [gamma]
 * with one `id -> id id ...` row per entry. */
EfrrRelation parse_relation(const std::string& text);
std::string serialize_relation(const EfrrRelation& q);

}  // namespace abocs
