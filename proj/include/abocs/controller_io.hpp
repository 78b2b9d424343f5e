#pragma once

#include <string>

#include "abocs/synthesis.hpp"

namespace abocs {

/* Structured-text controller format. Sections: [outputs], [inputs],
 * [memory], [initial], [step]; a step row reads 'z y -> u z2'. '#' starts
 * a comment. */
MealyController parse_controller(const std::string& text);
MealyController load_controller(const std::string& path);

/* Deterministic rendering, rows sorted by (memory, output);
 * parse(serialize(m)) == m. */
std::string serialize_controller(const MealyController& m);
void save_controller(const MealyController& m, const std::string& path);

/* Graphviz rendering: one node per memory state, edges labeled y/u. */
std::string controller_dot(const MealyController& m);

}  // namespace abocs
