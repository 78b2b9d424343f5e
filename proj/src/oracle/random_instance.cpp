#include "abocs/oracle/random_instance.hpp"

namespace abocs::oracle {

namespace {

/* explicit draws, so instances do not depend on library distribution
 * internals */
int draw(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

bool chance(std::mt19937_64& rng, double p) {
  return (rng() >> 11) * 0x1.0p-53 < p;
}

IdSet random_nonempty_subset(std::mt19937_64& rng, int n, double p) {
  IdSet s;
  for (int i = 0; i < n; ++i)
    if (chance(rng, p)) s.insert(i);
  if (s.empty()) s.insert(draw(rng, 0, n - 1));
  return s;
}

}  // namespace

FiniteSystem random_system(std::mt19937_64& rng, const SizeCaps& caps) {
  FiniteSystem s;
  int ns = draw(rng, 1, caps.max_states);
  int ni = draw(rng, 1, caps.max_inputs);
  int no = draw(rng, 1, caps.max_outputs);
  for (int i = 0; i < ns; ++i) s.states.intern("x" + std::to_string(i));
  for (int i = 0; i < ni; ++i) s.inputs.intern("u" + std::to_string(i));
  for (int i = 0; i < no; ++i) s.outputs.intern("y" + std::to_string(i));
  s.initial = random_nonempty_subset(rng, ns, 0.4);
  s.trans.assign(ns, std::vector<IdSet>(ni, IdSet{}));
  for (int x = 0; x < ns; ++x)
    for (int u = 0; u < ni; ++u)
      if (chance(rng, caps.trans_density))
        s.trans[x][u] = random_nonempty_subset(rng, ns, 0.45);
  s.out.assign(ns, IdSet{});
  for (int x = 0; x < ns; ++x) s.out[x] = random_nonempty_subset(rng, no, 0.5);
  s.validate();
  return s;
}

PredicateMaps random_predicates(std::mt19937_64& rng, const FiniteSystem& sys,
                                int num_aps) {
  PredicateMaps pm;
  const char* names[] = {"p", "q", "r"};
  for (int i = 0; i < num_aps; ++i) pm.ap_out.intern(names[i]);
  int letters = 1 << num_aps;
  pm.state_preds.assign(sys.num_states(), {});
  for (int x = 0; x < sys.num_states(); ++x) {
    IdSet ls = random_nonempty_subset(rng, letters, 0.35);
    for (int m : ls) pm.state_preds[x].push_back(static_cast<PredMask>(m));
  }
  pm.input_preds.assign(sys.num_inputs(), {0});
  pm.validate(sys);
  return pm;
}

std::string random_spec(std::mt19937_64& rng, int num_aps) {
  if (num_aps >= 2) {
    const char* fam[] = {"G !p", "F p", "GF p", "p U q"};
    return fam[draw(rng, 0, 3)];
  }
  const char* fam[] = {"G !p", "F p", "GF p"};
  return fam[draw(rng, 0, 2)];
}

FiniteSystem thicken_system(std::mt19937_64& rng, const FiniteSystem& sys) {
  FiniteSystem t = sys;
  int ns = t.num_states();
  for (int x = 0; x < ns; ++x) {
    for (int u = 0; u < t.num_inputs(); ++u)
      if (!t.trans[x][u].empty() && chance(rng, 0.4))
        t.trans[x][u].insert(draw(rng, 0, ns - 1));
    if (chance(rng, 0.3)) t.out[x].insert(draw(rng, 0, t.num_outputs() - 1));
    if (chance(rng, 0.2)) t.initial.insert(x);
  }
  return t;
}

RandomInstance random_instance(std::uint64_t seed, const SizeCaps& caps) {
  RandomInstance inst;
  inst.seed = seed;
  std::mt19937_64 rng(seed);
  inst.sys = random_system(rng, caps);
  inst.preds = random_predicates(rng, inst.sys, caps.num_aps);
  inst.spec = random_spec(rng, caps.num_aps);
  return inst;
}

}  // namespace abocs::oracle
