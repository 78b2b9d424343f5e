#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abocs/uca.hpp"

namespace abocs {

/* HOA v1 exchange, restricted to what the pipeline produces: state-based
 * acceptance, explicit edge labels. Exported automata use co-Buechi
 * acceptance ("1 Fin(0)") with the rejecting set as set 0. */

struct HoaAutomaton {
  Uca uca;                       // letters enumerate full AP valuations
  std::vector<std::string> aps;  // letter id bit i <-> aps[i]
};

/* letter_bits maps each letter id of a to its AP valuation (bit i set iff
 * aps[i] true); several letters may share a valuation, none may be left
 * out of range. */
std::string hoa_export(const Uca& a, const std::vector<std::string>& aps,
                       const std::vector<std::uint64_t>& letter_bits);

/* dualize_buchi reads a Buechi file ("1 Inf(0)") as the universal automaton
 * with that set rejecting; without the flag only co-Buechi ("1 Fin(0)") and
 * trivial ("0 t") acceptance are admitted. Anything else raises
 * UnsupportedAcceptanceError. */
HoaAutomaton hoa_import(const std::string& text, bool dualize_buchi = false);

}  // namespace abocs
