#include "abocs/refinement.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace abocs {

namespace {

int pick(const std::function<int(const IdSet&)>& f, const IdSet& s,
         const char* what) {
  if (s.empty()) throw ValidationError(std::string("empty ") + what);
  return f ? f(s) : s.front();
}

/* non-throwing variant for strategy replay */
std::optional<int> try_pick(const std::function<int(const IdSet&)>& f,
                            const IdSet& s) {
  if (s.empty()) return std::nullopt;
  return f ? f(s) : s.front();
}

IdSet beta_preimage(const EfrrRelation& q, int u) {
  IdSet pre;
  for (int uh = 0; uh < static_cast<int>(q.beta.size()); ++uh)
    if (q.beta[uh].contains(u)) pre.insert(uh);
  return pre;
}

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string mask_names(const SymbolTable& ap, PredMask mask) {
  std::string s;
  for (int i = 0; i < ap.size(); ++i) {
    if (!(mask & (PredMask{1} << i))) continue;
    if (!s.empty()) s += '|';
    s += ap.name(i);
  }
  return s;
}

}  // namespace

ExternalPrefix project_omega(const ExternalPrefix& sigma,
                             const EfrrRelation& q,
                             const SelectionPolicy& pol) {
  if (sigma.ys.size() != sigma.us.size() + 1)
    throw ValidationError("malformed external prefix");
  ExternalPrefix out;
  for (int y : sigma.ys) {
    if (y < 0 || y >= static_cast<int>(q.gamma.size()))
      throw ValidationError("output id outside the relation");
    out.ys.push_back(pick(pol.gamma_select, q.gamma[y], "gamma image"));
  }
  for (int u : sigma.us)
    out.us.push_back(
        pick(pol.input_project, beta_preimage(q, u), "beta preimage"));
  return out;
}

RefinedController make_refined(MealyController m, EfrrRelation q,
                               SelectionPolicy pol) {
  m.validate();
  RefinedController rc;
  rc.memory = m.initial;
  rc.mealy = std::move(m);
  rc.q = std::move(q);
  rc.policy = std::move(pol);
  return rc;
}

int refined_step(RefinedController& rc, int y) {
  if (y < 0 || y >= static_cast<int>(rc.q.gamma.size()))
    throw ValidationError("output id outside the relation");
  int yh = pick(rc.policy.gamma_select, rc.q.gamma[y], "gamma image");
  rc.trace.ys.push_back(yh);
  auto mv = rc.mealy.act(rc.memory, yh);
  if (!mv) throw UndefinedStrategy(rc.trace);
  rc.memory = mv->second;
  rc.trace.us.push_back(mv->first);
  if (mv->first < 0 || mv->first >= static_cast<int>(rc.q.beta.size()))
    throw ValidationError("input id outside the relation");
  return pick(rc.policy.beta_select, rc.q.beta[mv->first], "beta image");
}

Strategy refined_strategy(const MealyController& m, const EfrrRelation& q,
                          const SelectionPolicy& pol) {
  return [m, q, pol](const ExternalPrefix& pre) -> std::optional<int> {
    if (pre.ys.size() != pre.us.size() + 1) return std::nullopt;
    int z = m.initial;
    for (std::size_t k = 0; k < pre.ys.size(); ++k) {
      int y = pre.ys[k];
      if (y < 0 || y >= static_cast<int>(q.gamma.size())) return std::nullopt;
      auto yh = try_pick(pol.gamma_select, q.gamma[y]);
      if (!yh) return std::nullopt;
      auto mv = m.act(z, *yh);
      if (!mv) return std::nullopt;
      int uh = mv->first;
      if (uh < 0 || uh >= static_cast<int>(q.beta.size()))
        return std::nullopt;
      auto u = try_pick(pol.beta_select, q.beta[uh]);
      if (!u) return std::nullopt;
      if (k < pre.us.size()) {
        /* history must carry the controller's own choices */
        if (pre.us[k] != *u) return std::nullopt;
        z = mv->second;
      } else {
        return u;
      }
    }
    return std::nullopt;  // unreachable
  };
}

std::vector<FiniteTrace> simulate_closed_loop(const FiniteSystem& sys,
                                              const PredicateMaps& pm,
                                              const Strategy& ctrl, int steps,
                                              BranchMode mode,
                                              std::uint64_t seed) {
  if (steps < 1) throw ValidationError("steps must be positive");
  sys.validate();
  pm.validate(sys);
  std::vector<FiniteTrace> traces;

  if (mode == BranchMode::All) {
    FiniteTrace t;
    ExternalPrefix pre;
    std::function<void(int)> visit = [&](int x) {
      t.xs.push_back(x);
      for (int y : sys.out[x]) {
        t.ys.push_back(y);
        pre.ys.push_back(y);
        for (PredMask mask : pm.state_preds[x]) {
          t.state_letters.push_back(mask);
          if (static_cast<int>(t.us.size()) == steps) {
            traces.push_back(t);
          } else {
            auto u = ctrl(pre);
            if (!u)
              throw CompositionError(pre, CompositionError::Reason::Undefined);
            const IdSet& succ = sys.trans[x][*u];
            if (succ.empty())
              throw CompositionError(pre,
                                     CompositionError::Reason::NotEnabled);
            t.us.push_back(*u);
            pre.us.push_back(*u);
            for (PredMask umask : pm.input_preds[*u]) {
              t.input_letters.push_back(umask);
              for (int xn : succ) visit(xn);
              t.input_letters.pop_back();
            }
            t.us.pop_back();
            pre.us.pop_back();
          }
          t.state_letters.pop_back();
        }
        t.ys.pop_back();
        pre.ys.pop_back();
      }
      t.xs.pop_back();
    };
    for (int x0 : sys.initial) visit(x0);
    return traces;
  }

  std::mt19937_64 rng(seed);
  auto draw = [&](int n) { return static_cast<int>(rng() % n); };
  FiniteTrace t;
  ExternalPrefix pre;
  int x = sys.initial[draw(sys.initial.size())];
  for (int i = 0;; ++i) {
    t.xs.push_back(x);
    int y = sys.out[x][draw(sys.out[x].size())];
    t.ys.push_back(y);
    pre.ys.push_back(y);
    t.state_letters.push_back(
        pm.state_preds[x][draw(static_cast<int>(pm.state_preds[x].size()))]);
    if (i == steps) break;
    auto u = ctrl(pre);
    if (!u) throw CompositionError(pre, CompositionError::Reason::Undefined);
    const IdSet& succ = sys.trans[x][*u];
    if (succ.empty())
      throw CompositionError(pre, CompositionError::Reason::NotEnabled);
    t.us.push_back(*u);
    pre.us.push_back(*u);
    t.input_letters.push_back(
        pm.input_preds[*u][draw(static_cast<int>(pm.input_preds[*u].size()))]);
    x = succ[draw(succ.size())];
  }
  traces.push_back(t);
  return traces;
}

PredMask region_letter(const GriddedAbstraction& ga,
                       const std::vector<LabeledRegion>& regions,
                       const Vec& x) {
  if (static_cast<int>(x.size()) != ga.grid.theta.dim())
    throw ValidationError("point dimension mismatch");
  PredMask mask = 0;
  for (const auto& reg : regions) {
    int l = ga.preds.ap_out.lookup(reg.label);
    if (l < 0)
      throw ValidationError("region label not in the abstraction: " +
                            reg.label);
    for (const auto& box : reg.boxes)
      if (box.contains(x)) {
        mask |= PredMask{1} << l;
        break;
      }
  }
  if (!ga.grid.theta.contains(x))
    mask |= PredMask{1} << (ga.preds.ap_out.size() - 1);
  return mask;
}

ContinuousTrace simulate_closed_loop(const ControlSystem& cs,
                                     const GriddedAbstraction& ga,
                                     const MealyController& m,
                                     const std::vector<LabeledRegion>& regions,
                                     int steps, std::uint64_t seed,
                                     const SelectionPolicy& pol) {
  if (steps < 1) throw ValidationError("steps must be positive");
  cs.validate();
  m.validate();
  std::mt19937_64 rng(seed);
  const int d = cs.dim;
  const Box& start = cs.init ? *cs.init : ga.grid.theta;

  ContinuousTrace t;
  Vec x(d);
  for (int i = 0; i < d; ++i)
    x[i] = start.lo[i] + unit(rng) * (start.hi[i] - start.lo[i]);

  int z = m.initial;
  ExternalPrefix abs;
  for (int step = 0;; ++step) {
    Vec y = x;
    if (ga.grid.mode == OutputMode::Noisy)
      for (int i = 0; i < d; ++i)
        y[i] += (2.0 * unit(rng) - 1.0) * ga.grid.eps;
    t.xs.push_back(x);
    t.ys.push_back(y);
    t.letters.push_back(region_letter(ga, regions, x));
    int yh = pick(pol.gamma_select, ga.outputs_at(y), "gamma image");
    t.yhats.push_back(yh);
    abs.ys.push_back(yh);
    if (step == steps) break;
    auto mv = m.act(z, yh);
    if (!mv) throw UndefinedStrategy(abs);
    int uh = mv->first;
    z = mv->second;
    abs.us.push_back(uh);
    if (uh < 0 || uh >= static_cast<int>(ga.input_reps.size()))
      throw ValidationError("controller input outside the abstraction");
    t.us.push_back(uh);
    std::vector<Vec> w(ga.grid.rk_steps, Vec(d));
    for (auto& wk : w)
      for (int i = 0; i < d; ++i)
        wk[i] = (2.0 * unit(rng) - 1.0) * cs.dist[i];
    x = simulate_step(cs, x, ga.input_reps[uh], w, ga.grid.tau,
                      ga.grid.rk_steps);
  }
  return t;
}

RefinementCheck check_refinement(const FiniteSystem& conc,
                                 const FiniteSystem& abst,
                                 const EfrrRelation& q,
                                 const MealyController& m, int depth,
                                 const SelectionPolicy& pol) {
  if (depth < 1) throw ValidationError("depth must be positive");
  conc.validate();
  abst.validate();
  validate_relation(conc, abst, q);

  RefinementCheck r;
  r.prefix_closed = r.projections_in_loop = r.lifted_paths_comply =
      r.inputs_enabled = true;
  auto fail = [&](bool& flag, const std::string& msg) {
    flag = false;
    if (r.first_failure.empty()) r.first_failure = msg;
  };

  Strategy ctrl = refined_strategy(m, q, pol);
  Strategy actrl = induced_strategy(m);

  /* closed-loop prefix levels, built tolerantly so a partial controller
   * shows up as a clause failure instead of an exception */
  auto levels = [&](const FiniteSystem& sys, const Strategy& c,
                    bool* complete) {
    std::vector<std::set<ExternalPrefix>> p(depth + 1);
    for (const auto& [y, b] : initial_beliefs(sys))
      p[0].insert(ExternalPrefix{{y}, {}});
    for (int k = 0; k < depth; ++k) {
      for (const auto& pre : p[k]) {
        auto u = c(pre);
        if (!u || !enab_set(sys, last_belief(sys, pre)).contains(*u)) {
          if (complete) *complete = false;
          continue;
        }
        ExternalPrefix ext = pre;
        ext.us.push_back(*u);
        for (int y = 0; y < sys.num_outputs(); ++y) {
          if (belief_update(sys, last_belief(sys, pre), *u, y).empty())
            continue;
          ext.ys.push_back(y);
          p[k + 1].insert(ext);
          ext.ys.pop_back();
        }
      }
    }
    return p;
  };

  bool conc_total = true;
  auto P = levels(conc, ctrl, &conc_total);
  auto A = levels(abst, actrl, nullptr);

  /* (d) a defined, belief-enabled move at every reached prefix */
  for (int k = 0; k < depth; ++k) {
    for (const auto& pre : P[k]) {
      auto u = ctrl(pre);
      if (!u) {
        fail(r.inputs_enabled,
             "no move at a reached prefix, level " + std::to_string(k));
      } else if (!enab_set(conc, last_belief(conc, pre)).contains(*u)) {
        fail(r.inputs_enabled,
             "move not enabled under the belief, level " + std::to_string(k));
      }
    }
  }

  /* (a) truncation closure, and agreement with the iterative construction
   * whenever the controller is total on the reached prefixes */
  for (int k = 1; k <= depth; ++k) {
    for (const auto& pre : P[k]) {
      ExternalPrefix trunc = pre;
      trunc.ys.pop_back();
      trunc.us.pop_back();
      if (!P[k - 1].count(trunc))
        fail(r.prefix_closed,
             "truncation escapes level " + std::to_string(k - 1));
    }
  }
  if (conc_total) {
    try {
      for (int k = 0; k <= depth; ++k) {
        auto direct = closed_loop_prefixes(conc, ctrl, k);
        if (std::set<ExternalPrefix>(direct.begin(), direct.end()) != P[k])
          fail(r.prefix_closed,
               "level " + std::to_string(k) +
                   " disagrees with the iterative construction");
      }
    } catch (const CompositionError&) {
      fail(r.prefix_closed, "iterative construction aborted");
    }
  }

  /* (b) projections land in the abstract closed loop */
  std::map<ExternalPrefix, ExternalPrefix> proj;
  for (int k = 0; k <= depth; ++k) {
    for (const auto& pre : P[k]) {
      try {
        auto ab = project_omega(pre, q, pol);
        proj.emplace(pre, ab);
        if (!A[k].count(ab))
          fail(r.projections_in_loop,
               "projected prefix escapes the abstract loop, level " +
                   std::to_string(k));
      } catch (const ValidationError&) {
        fail(r.projections_in_loop,
             "projection undefined, level " + std::to_string(k));
      }
    }
  }

  /* (c) every lift of a compatible run follows the abstract dynamics */
  for (int k = 0; k <= depth; ++k) {
    for (const auto& pre : P[k]) {
      auto it = proj.find(pre);
      if (it == proj.end()) continue;  // already a (b) failure
      const ExternalPrefix& ab = it->second;
      Belief b = last_belief(conc, pre);
      for (int x : b) {
        const IdSet& ax = q.alpha[x];
        if (ax.empty()) {
          fail(r.lifted_paths_comply,
               "state without abstract cover, level " + std::to_string(k));
          continue;
        }
        if (k == 0 && !ax.subset_of(abst.initial))
          fail(r.lifted_paths_comply, "initial cover escapes the abstract "
                                      "initial set");
        for (int xh : ax)
          if (!abst.out[xh].contains(ab.ys.back()))
            fail(r.lifted_paths_comply,
                 "projected output not offered by a lift, level " +
                     std::to_string(k));
      }
      if (k == depth) continue;
      auto u = ctrl(pre);
      if (!u) continue;
      IdSet upre = beta_preimage(q, *u);
      auto uh = try_pick(pol.input_project, upre);
      if (!uh) {
        fail(r.lifted_paths_comply,
             "played input has no abstract preimage, level " +
                 std::to_string(k));
        continue;
      }
      for (int x : b) {
        for (int xn : conc.trans[x][*u]) {
          const IdSet& axn = q.alpha[xn];
          if (axn.empty()) {
            fail(r.lifted_paths_comply,
                 "successor without abstract cover, level " +
                     std::to_string(k));
            continue;
          }
          for (int xh : q.alpha[x])
            if (!axn.subset_of(abst.trans[xh][*uh]))
              fail(r.lifted_paths_comply,
                   "lifted step leaves the abstract dynamics, level " +
                       std::to_string(k));
        }
      }
    }
  }

  r.pass = r.prefix_closed && r.projections_in_loop &&
           r.lifted_paths_comply && r.inputs_enabled;
  return r;
}

std::string trace_csv(const FiniteSystem& sys, const PredicateMaps& pm,
                      const FiniteTrace& t) {
  std::ostringstream os;
  os << "t,x,u,y,state_preds,input_preds\n";
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    os << i << ',' << sys.states.name(t.xs[i]) << ',';
    if (i < t.us.size()) os << sys.inputs.name(t.us[i]);
    os << ',' << sys.outputs.name(t.ys[i]) << ','
       << mask_names(pm.ap_out, t.state_letters[i]) << ',';
    if (i < t.input_letters.size())
      os << mask_names(pm.ap_in, t.input_letters[i]);
    os << '\n';
  }
  return os.str();
}

std::string trace_csv(const GriddedAbstraction& ga, const ContinuousTrace& t) {
  const int d = ga.grid.theta.dim();
  std::ostringstream os;
  os << std::setprecision(17);
  os << 't';
  for (int i = 0; i < d; ++i) os << ",x" << i;
  os << ",u";
  for (int i = 0; i < d; ++i) os << ",y" << i;
  os << ",yhat,predicates\n";
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    os << i;
    for (int j = 0; j < d; ++j) os << ',' << t.xs[i][j];
    os << ',';
    if (i < t.us.size()) os << ga.sys.inputs.name(t.us[i]);
    for (int j = 0; j < d; ++j) os << ',' << t.ys[i][j];
    os << ',' << ga.sys.outputs.name(t.yhats[i]) << ','
       << mask_names(ga.preds.ap_out, t.letters[i]) << '\n';
  }
  return os.str();
}

std::string trace_svg(const GriddedAbstraction& ga,
                      const std::vector<LabeledRegion>& regions,
                      const ContinuousTrace& t) {
  const int d = ga.grid.theta.dim();
  const double w = 480, h = 360, m = 36;
  const Box& theta = ga.grid.theta;

  /* plotted plane: first two state dimensions, or time against the state
   * for a scalar plant */
  double x_lo, x_hi, y_lo, y_hi;
  if (d >= 2) {
    x_lo = theta.lo[0], x_hi = theta.hi[0];
    y_lo = theta.lo[1], y_hi = theta.hi[1];
  } else {
    x_lo = 0, x_hi = std::max<std::size_t>(t.xs.size(), 2) - 1;
    y_lo = theta.lo[0], y_hi = theta.hi[0];
  }
  auto px = [&](double v) { return m + (v - x_lo) / (x_hi - x_lo) * (w - 2 * m); };
  auto py = [&](double v) {
    return h - m - (v - y_lo) / (y_hi - y_lo) * (h - 2 * m);
  };

  static const char* palette[] = {"#4c78a8", "#f58518", "#54a24b",
                                  "#b279a2", "#e45756", "#72b7b2"};
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "' viewBox='0 0 " << w << ' ' << h << "'>\n";
  os << "<rect x='" << px(x_lo) << "' y='" << py(y_hi) << "' width='"
     << px(x_hi) - px(x_lo) << "' height='" << py(y_lo) - py(y_hi)
     << "' fill='none' stroke='#333'/>\n";
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const char* color = palette[i % 6];
    for (const auto& box : regions[i].boxes) {
      double bx0, bx1, by0, by1;
      if (d >= 2) {
        bx0 = box.lo[0], bx1 = box.hi[0];
        by0 = box.lo[1], by1 = box.hi[1];
      } else {
        bx0 = x_lo, bx1 = x_hi;
        by0 = box.lo[0], by1 = box.hi[0];
      }
      os << "<rect x='" << px(bx0) << "' y='" << py(by1) << "' width='"
         << px(bx1) - px(bx0) << "' height='" << py(by0) - py(by1)
         << "' fill='" << color << "' fill-opacity='0.35'/>\n";
    }
    if (!regions[i].boxes.empty()) {
      const auto& box = regions[i].boxes.front();
      double tx = d >= 2 ? box.lo[0] : x_lo;
      double ty = d >= 2 ? box.hi[1] : box.hi[0];
      os << "<text x='" << px(tx) + 2 << "' y='" << py(ty) + 12
         << "' font-size='10' fill='" << color << "'>" << regions[i].label
         << "</text>\n";
    }
  }
  os << "<polyline fill='none' stroke='#1a1a1a' stroke-width='1.5' points='";
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    double vx = d >= 2 ? t.xs[i][0] : static_cast<double>(i);
    double vy = d >= 2 ? t.xs[i][1] : t.xs[i][0];
    if (i) os << ' ';
    os << px(vx) << ',' << py(vy);
  }
  os << "'/>\n";
  if (!t.xs.empty()) {
    auto dot = [&](const Vec& v, std::size_t i, const char* color) {
      double vx = d >= 2 ? v[0] : static_cast<double>(i);
      double vy = d >= 2 ? v[1] : v[0];
      os << "<circle cx='" << px(vx) << "' cy='" << py(vy)
         << "' r='3' fill='" << color << "'/>\n";
    };
    dot(t.xs.front(), 0, "#54a24b");
    dot(t.xs.back(), t.xs.size() - 1, "#e45756");
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace abocs
