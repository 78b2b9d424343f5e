#pragma once

#include "abocs/system.hpp"

/* Two-state running example used throughout the tests: in x0 input a may
 * stay or move to x1, input b stays; x1 only supports a (self loop); x1 may
 * look like x0 through output y0. */
inline abocs::FiniteSystem make_s2() {
  using namespace abocs;
  FiniteSystem s;
  int x0 = s.states.intern("x0");
  int x1 = s.states.intern("x1");
  int a = s.inputs.intern("a");
  int b = s.inputs.intern("b");
  int y0 = s.outputs.intern("y0");
  int y1 = s.outputs.intern("y1");
  s.initial = {x0};
  s.trans.assign(2, std::vector<IdSet>(2, IdSet{}));
  s.trans[x0][a] = {x0, x1};
  s.trans[x0][b] = {x0};
  s.trans[x1][a] = {x1};
  s.out.assign(2, IdSet{});
  s.out[x0] = {y0};
  s.out[x1] = {y0, y1};
  s.validate();
  return s;
}

/* p marks x1 */
inline abocs::PredicateMaps make_s2_preds() {
  using namespace abocs;
  PredicateMaps pm;
  pm.ap_out.intern("p");
  pm.state_preds = {{0u}, {1u}};
  pm.input_preds = {{0u}, {0u}};
  return pm;
}
