#pragma once

#include "abocs/efrr.hpp"

namespace abocs::oracle {

/* Literal transcription of the relation soundness clauses as nested loops
 * over (state, abstract state, abstract input, successor), with linear
 * membership scans. Verdict only; deliberately naive so it can cross-check
 * the witness-producing checker. */
bool efrr_holds_ref(const FiniteSystem& conc, const FiniteSystem& abst,
                    const EfrrRelation& q);

}  // namespace abocs::oracle
