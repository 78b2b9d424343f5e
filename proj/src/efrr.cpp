#include "abocs/efrr.hpp"

#include <random>

namespace abocs {

void validate_relation(const FiniteSystem& conc, const FiniteSystem& abst,
                       const EfrrRelation& q) {
  if (static_cast<int>(q.alpha.size()) != conc.num_states() ||
      static_cast<int>(q.beta.size()) != abst.num_inputs() ||
      static_cast<int>(q.gamma.size()) != conc.num_outputs())
    throw ValidationError("relation tables do not match the two systems");
  auto in_range = [](const std::vector<IdSet>& t, int n) {
    for (const IdSet& s : t)
      if (!s.empty() && (s.front() < 0 || s[s.size() - 1] >= n)) return false;
    return true;
  };
  if (!in_range(q.alpha, abst.num_states()))
    throw ValidationError("relation maps to an unknown abstract state");
  if (!in_range(q.beta, conc.num_inputs()))
    throw ValidationError("relation maps to an unknown concrete input");
  if (!in_range(q.gamma, abst.num_outputs()))
    throw ValidationError("relation maps to an unknown abstract output");
}

EfrrRelation identity_relation(const FiniteSystem& sys) {
  EfrrRelation q;
  for (int x = 0; x < sys.num_states(); ++x) q.alpha.push_back(IdSet{x});
  for (int u = 0; u < sys.num_inputs(); ++u) q.beta.push_back(IdSet{u});
  for (int y = 0; y < sys.num_outputs(); ++y) q.gamma.push_back(IdSet{y});
  return q;
}

EfrrRelation inverse_relation(const EfrrRelation& q, const FiniteSystem& conc,
                              const FiniteSystem& abst) {
  validate_relation(conc, abst, q);
  EfrrRelation r;
  r.alpha.assign(abst.num_states(), {});
  for (int x = 0; x < conc.num_states(); ++x)
    for (int xh : q.alpha[x]) r.alpha[xh].insert(x);
  r.beta.assign(conc.num_inputs(), {});
  for (int uh = 0; uh < abst.num_inputs(); ++uh)
    for (int u : q.beta[uh]) r.beta[u].insert(uh);
  r.gamma.assign(abst.num_outputs(), {});
  for (int y = 0; y < conc.num_outputs(); ++y)
    for (int yh : q.gamma[y]) r.gamma[yh].insert(y);
  return r;
}

const char* clause_name(EfrrClause c) {
  switch (c) {
    case EfrrClause::InitialCover:
      return "initial-cover";
    case EfrrClause::InputEnabled:
      return "input-enabled";
    case EfrrClause::SuccessorCover:
      return "successor-cover";
    case EfrrClause::OutputCover:
      return "output-cover";
  }
  return "?";
}

std::string EfrrReport::render() const {
  if (pass) return "pass\n";
  std::string s = "fail " + std::to_string(violations.size()) + "\n";
  for (const EfrrViolation& v : violations) {
    s += clause_name(v.clause);
    if (v.x >= 0) s += " x=" + std::to_string(v.x);
    if (v.xhat >= 0) s += " xhat=" + std::to_string(v.xhat);
    if (v.uhat >= 0) s += " uhat=" + std::to_string(v.uhat);
    s += '\n';
  }
  return s;
}

EfrrReport check_sound_abstraction(const FiniteSystem& conc,
                                   const FiniteSystem& abst,
                                   const EfrrRelation& q) {
  validate_relation(conc, abst, q);
  EfrrReport rep;
  auto flag = [&](EfrrClause c, int x, int xh, int uh) {
    rep.violations.push_back({c, x, xh, uh});
  };
  for (int x : conc.initial)
    if (q.alpha[x].empty() || !q.alpha[x].subset_of(abst.initial))
      flag(EfrrClause::InitialCover, x, -1, -1);
  for (int x = 0; x < conc.num_states(); ++x) {
    IdSet enab = conc.enabled(x);
    for (int xh : q.alpha[x]) {
      for (int uh : abst.enabled(xh)) {
        const IdSet& bu = q.beta[uh];
        if (bu.empty() || !bu.subset_of(enab))
          flag(EfrrClause::InputEnabled, x, xh, uh);
        IdSet succ;
        for (int u : bu) succ = set_union(succ, conc.trans[x][u]);
        IdSet img;
        for (int x2 : succ) img = set_union(img, q.alpha[x2]);
        if (img.empty() || !img.subset_of(abst.trans[xh][uh]))
          flag(EfrrClause::SuccessorCover, x, xh, uh);
      }
      IdSet outs;
      for (int y : conc.out[x]) outs = set_union(outs, q.gamma[y]);
      if (outs.empty() || !outs.subset_of(abst.out[xh]))
        flag(EfrrClause::OutputCover, x, xh, -1);
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

std::string RealizationReport::render() const {
  std::string s = pass ? "pass\n" : "fail\n";
  s += "[forward]\n" + forward.render();
  s += "[inverse]\n" + inverse.render();
  return s;
}

RealizationReport check_sound_realization(const FiniteSystem& conc,
                                          const FiniteSystem& abst,
                                          const EfrrRelation& q) {
  RealizationReport rep;
  rep.forward = check_sound_abstraction(conc, abst, q);
  rep.inverse =
      check_sound_abstraction(abst, conc, inverse_relation(q, conc, abst));
  rep.pass = rep.forward.pass && rep.inverse.pass;
  return rep;
}

std::string SampledReport::render() const {
  std::string s = "sampling only, a pass is not a proof\n";
  s += pass ? "pass" : "fail";
  s += " samples=" + std::to_string(samples);
  s += " violations=" + std::to_string(violations);
  s += '\n';
  for (const std::string& w : witnesses) s += w + '\n';
  return s;
}

SampledReport check_sampled(const ControlSystem& cs,
                            const GriddedAbstraction& ga, int samples,
                            unsigned seed, double tau) {
  cs.validate();
  if (samples < 0) throw ValidationError("negative sample count");
  double T = tau > 0 ? tau : ga.grid.tau;
  int dim = cs.dim;
  int m = static_cast<int>(cs.inputs.size());
  std::mt19937_64 rng(seed);
  auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
  const Box& th = ga.grid.theta;
  SampledReport rep;
  rep.samples = samples;
  for (int n = 0; n < samples; ++n) {
    Vec x(dim);
    for (int d = 0; d < dim; ++d)
      x[d] = th.lo[d] + unit() * (th.hi[d] - th.lo[d]);
    int j = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
    std::vector<Vec> w(ga.grid.rk_steps, Vec(dim));
    for (Vec& wk : w)
      for (int d = 0; d < dim; ++d) wk[d] = (2.0 * unit() - 1.0) * cs.dist[d];
    Vec y = x;
    if (ga.grid.mode == OutputMode::Noisy)
      for (int d = 0; d < dim; ++d) y[d] += (2.0 * unit() - 1.0) * ga.grid.eps;
    IdSet ax = ga.cells_at(x);
    Vec end = simulate_step(cs, x, cs.inputs[j], w, T, ga.grid.rk_steps);
    IdSet ae = ga.cells_at(end);
    IdSet gy = ga.outputs_at(y);
    bool bad = ax.empty() || ae.empty() || gy.empty();
    for (int xh : ax) {
      if (!ae.subset_of(ga.sys.trans[xh][j])) bad = true;
      if (!gy.subset_of(ga.sys.out[xh])) bad = true;
    }
    if (!bad) continue;
    ++rep.violations;
    if (rep.witnesses.size() < 5) {
      std::string wtn = "sample " + std::to_string(n) + ": x=(";
      for (int d = 0; d < dim; ++d) {
        if (d) wtn += ',';
        wtn += std::to_string(x[d]);
      }
      wtn += ") input=" + std::to_string(j);
      rep.witnesses.push_back(wtn);
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace abocs
