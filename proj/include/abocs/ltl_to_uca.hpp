#pragma once

#include "abocs/ltl.hpp"
#include "abocs/system.hpp"
#include "abocs/uca.hpp"

namespace abocs {

/* Alphabet of predicate letters: one symbol per pair of truth assignments
 * (input propositions, state propositions). Letter ids enumerate the input
 * mask in the high bits. */
struct PredAlphabet {
  SymbolTable ap_in;
  SymbolTable ap_out;

  int num_letters() const {
    return 1 << (ap_in.size() + ap_out.size());
  }
  int letter(PredMask in_m, PredMask out_m) const {
    return (static_cast<int>(in_m) << ap_out.size()) |
           static_cast<int>(out_m);
  }
  PredMask in_of(int l) const {
    return static_cast<PredMask>(l >> ap_out.size());
  }
  PredMask out_of(int l) const {
    return static_cast<PredMask>(l & ((1 << ap_out.size()) - 1));
  }

  void check_size() const;
};

/* Tableau construction: nondeterministic Buechi automaton for f (after
 * negation normal form and shrink rewrites), degeneralized to a single
 * accepting set. `rejecting` holds the accepting states. */
Nba ltl_to_nba(LtlFactory& fac, LtlRef f, const PredAlphabet& ab);

/* Universal co-Buechi automaton for f with L(A) = models of f: the tableau
 * automaton of the negation reinterpreted with universal branching (its
 * accepting set becomes the rejecting set), then completed. Result is
 * total. */
Uca ltl_to_uca(LtlFactory& fac, LtlRef f, const PredAlphabet& ab);

}  // namespace abocs
