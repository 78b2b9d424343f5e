#include "abocs/continuous.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

namespace abocs {

namespace {

/* slack for closed comparisons on grid arithmetic */
constexpr double kTol = 1e-9;

bool finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Vec axpy(const Vec& x, double a, const Vec& y) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
  return r;
}

int dim_count(const Box& theta, double w, int d) {
  return static_cast<int>(std::llround((theta.hi[d] - theta.lo[d]) / w));
}

/* grid line coordinates along one axis; the outer two are the region
 * bounds themselves so boundary comparisons stay exact */
Vec dim_edges(const Box& theta, double w, int nd, int d) {
  Vec e(nd + 1);
  for (int i = 0; i <= nd; ++i) e[i] = theta.lo[d] + i * w;
  e[0] = theta.lo[d];
  e[nd] = theta.hi[d];
  return e;
}

std::vector<int> strides_of(const std::vector<int>& counts) {
  std::vector<int> s(counts.size(), 1);
  for (int d = static_cast<int>(counts.size()) - 2; d >= 0; --d)
    s[d] = s[d + 1] * counts[d + 1];
  return s;
}

std::string joined_name(const char* prefix, const std::vector<int>& idx) {
  std::string s = prefix;
  for (std::size_t d = 0; d < idx.size(); ++d) {
    if (d) s += '_';
    s += std::to_string(idx[d]);
  }
  return s;
}

bool next_tuple(std::vector<int>& idx, const std::vector<int>& counts) {
  for (int d = static_cast<int>(idx.size()) - 1; d >= 0; --d) {
    if (++idx[d] < counts[d]) return true;
    idx[d] = 0;
  }
  return false;
}

/* cells along one axis whose closed interval meets [a, b] */
std::vector<int> overlap_range(const Vec& edges, double a, double b) {
  std::vector<int> r;
  for (int i = 0; i + 1 < static_cast<int>(edges.size()); ++i)
    if (edges[i] <= b + kTol && edges[i + 1] >= a - kTol) r.push_back(i);
  return r;
}

/* ids of the index product, ascending because strides are row-major */
void product_insert(const std::vector<std::vector<int>>& rng,
                    const std::vector<int>& stride, IdSet& out) {
  std::vector<std::size_t> pos(rng.size(), 0);
  for (;;) {
    int id = 0;
    for (std::size_t d = 0; d < rng.size(); ++d) id += rng[d][pos[d]] * stride[d];
    out.insert(id);
    std::size_t d = rng.size();
    for (; d > 0; --d) {
      if (++pos[d - 1] < rng[d - 1].size()) break;
      pos[d - 1] = 0;
    }
    if (d == 0) return;
  }
}

/* distance in the max norm from a box to the escape set on one side: the
 * escape sets are unions over axes of open half spaces, so the distance is
 * the best axis */
double gap_to_low(const Box& c, const Box& theta) {
  double g = std::numeric_limits<double>::infinity();
  for (int d = 0; d < c.dim(); ++d)
    g = std::min(g, std::max(0.0, c.lo[d] - theta.lo[d]));
  return g;
}

double gap_to_high(const Box& c, const Box& theta) {
  double g = std::numeric_limits<double>::infinity();
  for (int d = 0; d < c.dim(); ++d)
    g = std::min(g, std::max(0.0, theta.hi[d] - c.hi[d]));
  return g;
}

double box_gap(const Box& a, const Box& b) {
  double g = 0;
  for (int d = 0; d < a.dim(); ++d) {
    g = std::max(g, b.lo[d] - a.hi[d]);
    g = std::max(g, a.lo[d] - b.hi[d]);
  }
  return g;
}

/* max-norm distance between abstract states, measured between the regions
 * of space they stand for; pairs of escape states count as touching, which
 * only widens the output map */
double state_gap(const GriddedAbstraction& ga, int a, int b) {
  bool aesc = a == ga.low_id || a == ga.high_id;
  bool besc = b == ga.low_id || b == ga.high_id;
  if (aesc && besc) return 0;
  if (aesc) std::swap(a, b);
  const Box& ca = ga.cell_box[a];
  if (b == ga.low_id) return gap_to_low(ca, ga.grid.theta);
  if (b == ga.high_id) return gap_to_high(ca, ga.grid.theta);
  return box_gap(ca, ga.cell_box[b]);
}

}  // namespace

bool Box::contains(const Vec& x) const {
  for (int d = 0; d < dim(); ++d)
    if (x[d] < lo[d] || x[d] > hi[d]) return false;
  return true;
}

Vec Box::center() const {
  Vec c(lo.size());
  for (std::size_t d = 0; d < lo.size(); ++d) c[d] = 0.5 * (lo[d] + hi[d]);
  return c;
}

Vec Box::radius() const {
  Vec r(lo.size());
  for (std::size_t d = 0; d < lo.size(); ++d) r[d] = 0.5 * (hi[d] - lo[d]);
  return r;
}

void Box::validate() const {
  if (lo.size() != hi.size())
    throw ValidationError("box bounds disagree on dimension");
  for (std::size_t d = 0; d < lo.size(); ++d) {
    if (!std::isfinite(lo[d]) || !std::isfinite(hi[d]))
      throw ValidationError("box bound is not finite");
    if (lo[d] > hi[d]) throw ValidationError("box is empty");
  }
}

void ControlSystem::validate() const {
  if (dim <= 0) throw ValidationError("state dimension must be positive");
  if (!field) throw ValidationError("vector field is missing");
  if (inputs.empty()) throw ValidationError("no input representatives");
  for (const Vec& u : inputs)
    if (u.size() != inputs.front().size())
      throw ValidationError("input representatives disagree on dimension");
  if (static_cast<int>(dist.size()) != dim)
    throw ValidationError("disturbance radius has wrong dimension");
  for (double w : dist)
    if (!(w >= 0)) throw ValidationError("disturbance radius must be nonnegative");
  if (static_cast<int>(growth.size()) != dim)
    throw ValidationError("growth matrix has wrong shape");
  for (int i = 0; i < dim; ++i) {
    if (static_cast<int>(growth[i].size()) != dim)
      throw ValidationError("growth matrix has wrong shape");
    for (int j = 0; j < dim; ++j) {
      if (!std::isfinite(growth[i][j]))
        throw ValidationError("growth matrix entry is not finite");
      if (i != j && growth[i][j] < 0)
        throw ValidationError("growth matrix off-diagonal must be nonnegative");
    }
  }
  if (init) {
    init->validate();
    if (init->dim() != dim)
      throw ValidationError("initial box has wrong dimension");
  }
}

void GridSpec::validate(int dim) const {
  theta.validate();
  if (theta.dim() != dim) throw GridError("region of interest has wrong dimension");
  if (static_cast<int>(eta.size()) != dim)
    throw GridError("cell width has wrong dimension");
  for (int d = 0; d < dim; ++d) {
    if (!(eta[d] > 0)) throw GridError("cell width must be positive");
    if (!(theta.hi[d] > theta.lo[d]))
      throw GridError("region of interest is degenerate");
    double n = (theta.hi[d] - theta.lo[d]) / eta[d];
    if (std::abs(n - std::round(n)) > 1e-6 * std::max(1.0, n))
      throw GridError("cell width does not divide the region of interest");
  }
  if (!(tau > 0)) throw GridError("sampling period must be positive");
  if (rk_steps <= 0) throw GridError("integrator step count must be positive");
  if (mode == OutputMode::Tiles) {
    if (static_cast<int>(out_eta.size()) != dim)
      throw GridError("tile width has wrong dimension");
    for (int d = 0; d < dim; ++d) {
      if (!(out_eta[d] > 0)) throw GridError("tile width must be positive");
      double m = (theta.hi[d] - theta.lo[d]) / out_eta[d];
      if (std::abs(m - std::round(m)) > 1e-6 * std::max(1.0, m))
        throw GridError("tile width does not divide the region of interest");
    }
  } else {
    if (!(eps >= 0)) throw GridError("measurement error must be nonnegative");
  }
}

Box reach_overapprox(const ControlSystem& cs, const Box& cell, const Vec& u,
                     double tau, int steps) {
  if (tau == 0) return cell;
  if (steps <= 0) throw ValidationError("integrator step count must be positive");
  int n = cs.dim;
  Vec c = cell.center(), r = cell.radius();
  double h = tau / steps;
  auto rdot = [&](const Vec& rr) {
    Vec d(n);
    for (int i = 0; i < n; ++i) {
      double s = cs.dist[i];
      for (int j = 0; j < n; ++j) s += cs.growth[i][j] * rr[j];
      d[i] = s;
    }
    return d;
  };
  for (int k = 0; k < steps; ++k) {
    Vec k1c = cs.field(c, u), k1r = rdot(r);
    Vec k2c = cs.field(axpy(c, 0.5 * h, k1c), u), k2r = rdot(axpy(r, 0.5 * h, k1r));
    Vec k3c = cs.field(axpy(c, 0.5 * h, k2c), u), k3r = rdot(axpy(r, 0.5 * h, k2r));
    Vec k4c = cs.field(axpy(c, h, k3c), u), k4r = rdot(axpy(r, h, k3r));
    for (int i = 0; i < n; ++i) {
      c[i] += h / 6.0 * (k1c[i] + 2 * k2c[i] + 2 * k3c[i] + k4c[i]);
      r[i] += h / 6.0 * (k1r[i] + 2 * k2r[i] + 2 * k3r[i] + k4r[i]);
      r[i] = std::max(r[i], 0.0);
    }
  }
  Box out;
  out.lo.resize(n);
  out.hi.resize(n);
  for (int i = 0; i < n; ++i) {
    out.lo[i] = c[i] - r[i];
    out.hi[i] = c[i] + r[i];
  }
  return out;
}

Vec simulate_step(const ControlSystem& cs, Vec x, const Vec& u,
                  const std::vector<Vec>& w, double tau, int steps) {
  if (steps <= 0) throw ValidationError("integrator step count must be positive");
  if (static_cast<int>(w.size()) != steps)
    throw ValidationError("need one disturbance sample per substep");
  double h = tau / steps;
  for (int k = 0; k < steps; ++k) {
    const Vec& wk = w[k];
    if (static_cast<int>(wk.size()) != cs.dim)
      throw ValidationError("disturbance sample has wrong dimension");
    auto g = [&](const Vec& xx) {
      Vec d = cs.field(xx, u);
      for (int i = 0; i < cs.dim; ++i) d[i] += wk[i];
      return d;
    };
    Vec k1 = g(x);
    Vec k2 = g(axpy(x, 0.5 * h, k1));
    Vec k3 = g(axpy(x, 0.5 * h, k2));
    Vec k4 = g(axpy(x, h, k3));
    for (int i = 0; i < cs.dim; ++i)
      x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return x;
}

IdSet GriddedAbstraction::cells_at(const Vec& x) const {
  const Box& th = grid.theta;
  if (static_cast<int>(x.size()) != th.dim())
    throw ValidationError("point has wrong dimension");
  IdSet r;
  int dim = th.dim();
  std::vector<int> counts(dim);
  std::vector<std::vector<int>> rng(dim);
  bool any = true;
  for (int d = 0; d < dim; ++d) {
    counts[d] = dim_count(th, grid.eta[d], d);
    Vec e = dim_edges(th, grid.eta[d], counts[d], d);
    for (int i = 0; i < counts[d]; ++i)
      if (e[i] <= x[d] && x[d] <= e[i + 1]) rng[d].push_back(i);
    if (rng[d].empty()) any = false;
  }
  if (any) product_insert(rng, strides_of(counts), r);
  for (int d = 0; d < dim; ++d)
    if (x[d] < th.lo[d]) {
      r.insert(low_id);
      break;
    }
  for (int d = 0; d < dim; ++d)
    if (x[d] > th.hi[d]) {
      r.insert(high_id);
      break;
    }
  return r;
}

IdSet GriddedAbstraction::outputs_at(const Vec& y) const {
  const Box& th = grid.theta;
  if (static_cast<int>(y.size()) != th.dim())
    throw ValidationError("point has wrong dimension");
  IdSet r;
  int dim = th.dim();
  if (grid.mode == OutputMode::Tiles) {
    std::vector<int> counts(dim);
    std::vector<std::vector<int>> rng(dim);
    bool any = true;
    for (int d = 0; d < dim; ++d) {
      counts[d] = dim_count(th, grid.out_eta[d], d);
      Vec e = dim_edges(th, grid.out_eta[d], counts[d], d);
      for (int i = 0; i < counts[d]; ++i)
        if (e[i] <= y[d] && y[d] <= e[i + 1]) rng[d].push_back(i);
      if (rng[d].empty()) any = false;
    }
    if (any) product_insert(rng, strides_of(counts), r);
    for (int d = 0; d < dim; ++d)
      if (y[d] < th.lo[d] || y[d] > th.hi[d]) {
        r.insert(out_of_range);
        break;
      }
  } else {
    double lim = grid.eps + kTol;
    for (std::size_t j = 0; j < cell_box.size(); ++j) {
      const Box& c = cell_box[j];
      double g = 0;
      for (int d = 0; d < dim; ++d) {
        g = std::max(g, c.lo[d] - y[d]);
        g = std::max(g, y[d] - c.hi[d]);
      }
      if (g <= lim) r.insert(static_cast<int>(j));
    }
    double glo = std::numeric_limits<double>::infinity();
    double ghi = std::numeric_limits<double>::infinity();
    for (int d = 0; d < dim; ++d) {
      glo = std::min(glo, std::max(0.0, y[d] - th.lo[d]));
      ghi = std::min(ghi, std::max(0.0, th.hi[d] - y[d]));
    }
    if (glo <= lim) r.insert(low_id);
    if (ghi <= lim) r.insert(high_id);
  }
  return r;
}

GriddedAbstraction build_abstraction(const ControlSystem& cs,
                                     const GridSpec& grid,
                                     const std::vector<LabeledRegion>& regions,
                                     int jobs) {
  cs.validate();
  grid.validate(cs.dim);
  for (const LabeledRegion& reg : regions) {
    if (reg.label.empty()) throw ValidationError("region label is empty");
    if (reg.label == "violation")
      throw ValidationError("region label 'violation' is reserved");
    for (const Box& b : reg.boxes) {
      b.validate();
      if (b.dim() != cs.dim)
        throw ValidationError("region box has wrong dimension");
    }
  }

  const int dim = cs.dim;
  const int m = static_cast<int>(cs.inputs.size());

  GriddedAbstraction ga;
  ga.grid = grid;
  ga.input_reps = cs.inputs;

  std::vector<int> counts(dim);
  std::vector<Vec> edges(dim);
  long long total = 1;
  for (int d = 0; d < dim; ++d) {
    counts[d] = dim_count(grid.theta, grid.eta[d], d);
    edges[d] = dim_edges(grid.theta, grid.eta[d], counts[d], d);
    total *= counts[d];
    if (total > 10'000'000) throw GridError("grid is too fine");
  }
  const int num_cells = static_cast<int>(total);
  std::vector<int> stride = strides_of(counts);

  std::vector<int> idx(dim, 0);
  do {
    Box b;
    b.lo.resize(dim);
    b.hi.resize(dim);
    for (int d = 0; d < dim; ++d) {
      b.lo[d] = edges[d][idx[d]];
      b.hi[d] = edges[d][idx[d] + 1];
    }
    ga.cell_box.push_back(std::move(b));
    ga.sys.states.intern(joined_name("c", idx));
  } while (next_tuple(idx, counts));
  ga.low_id = num_cells;
  ga.high_id = num_cells + 1;
  ga.sys.states.intern("oob_lo");
  ga.sys.states.intern("oob_hi");

  for (int j = 0; j < m; ++j) ga.sys.inputs.intern("u" + std::to_string(j));

  /* transitions: one reachable-set box per cell and input, then the cells
   * it meets plus the escape states for the directions it leaves in */
  ga.sys.trans.assign(num_cells + 2, std::vector<IdSet>(m));
  auto work = [&](int cell) {
    for (int j = 0; j < m; ++j) {
      Box R = reach_overapprox(cs, ga.cell_box[cell], cs.inputs[j], grid.tau,
                               grid.rk_steps);
      IdSet s;
      if (!finite(R.lo) || !finite(R.hi)) {
        s.insert(ga.low_id);
        s.insert(ga.high_id);
      } else {
        bool esc_lo = false, esc_hi = false;
        std::vector<std::vector<int>> rng(dim);
        bool any = true;
        for (int d = 0; d < dim; ++d) {
          esc_lo = esc_lo || R.lo[d] < grid.theta.lo[d];
          esc_hi = esc_hi || R.hi[d] > grid.theta.hi[d];
          rng[d] = overlap_range(edges[d], R.lo[d], R.hi[d]);
          if (rng[d].empty()) any = false;
        }
        if (any) product_insert(rng, stride, s);
        if (esc_lo) s.insert(ga.low_id);
        if (esc_hi) s.insert(ga.high_id);
      }
      ga.sys.trans[cell][j] = std::move(s);
    }
  };
  if (jobs > 1 && num_cells > 1) {
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
      try {
        for (;;) {
          int c = next.fetch_add(1);
          if (c >= num_cells) return;
          work(c);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    int nthreads = std::min(jobs, num_cells);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
    if (err) std::rethrow_exception(err);
  } else {
    for (int c = 0; c < num_cells; ++c) work(c);
  }
  for (int j = 0; j < m; ++j) {
    ga.sys.trans[ga.low_id][j].insert(ga.low_id);
    ga.sys.trans[ga.high_id][j].insert(ga.high_id);
  }

  if (!cs.init) {
    ga.sys.initial = IdSet::range(num_cells + 2);
  } else {
    const Box& b = *cs.init;
    std::vector<std::vector<int>> rng(dim);
    bool any = true;
    for (int d = 0; d < dim; ++d) {
      rng[d] = overlap_range(edges[d], b.lo[d], b.hi[d]);
      if (rng[d].empty()) any = false;
    }
    if (any) product_insert(rng, stride, ga.sys.initial);
    for (int d = 0; d < dim; ++d)
      if (b.lo[d] < grid.theta.lo[d]) {
        ga.sys.initial.insert(ga.low_id);
        break;
      }
    for (int d = 0; d < dim; ++d)
      if (b.hi[d] > grid.theta.hi[d]) {
        ga.sys.initial.insert(ga.high_id);
        break;
      }
  }

  ga.sys.out.assign(num_cells + 2, {});
  if (grid.mode == OutputMode::Tiles) {
    std::vector<int> tcounts(dim);
    std::vector<Vec> tedges(dim);
    for (int d = 0; d < dim; ++d) {
      tcounts[d] = dim_count(grid.theta, grid.out_eta[d], d);
      tedges[d] = dim_edges(grid.theta, grid.out_eta[d], tcounts[d], d);
    }
    std::vector<int> tstride = strides_of(tcounts);
    std::vector<int> tidx(dim, 0);
    do {
      Box b;
      b.lo.resize(dim);
      b.hi.resize(dim);
      for (int d = 0; d < dim; ++d) {
        b.lo[d] = tedges[d][tidx[d]];
        b.hi[d] = tedges[d][tidx[d] + 1];
      }
      ga.tile_box.push_back(std::move(b));
      ga.sys.outputs.intern(joined_name("t", tidx));
    } while (next_tuple(tidx, tcounts));
    ga.out_of_range = static_cast<int>(ga.tile_box.size());
    ga.sys.outputs.intern("out_of_range");
    for (int c = 0; c < num_cells; ++c) {
      std::vector<std::vector<int>> rng(dim);
      for (int d = 0; d < dim; ++d)
        rng[d] = overlap_range(tedges[d], ga.cell_box[c].lo[d],
                               ga.cell_box[c].hi[d]);
      product_insert(rng, tstride, ga.sys.out[c]);
    }
    ga.sys.out[ga.low_id] = IdSet{ga.out_of_range};
    ga.sys.out[ga.high_id] = IdSet{ga.out_of_range};
  } else {
    for (int s = 0; s < num_cells + 2; ++s)
      ga.sys.outputs.intern(ga.sys.states.name(s));
    double lim = grid.eps + kTol;
    for (int a = 0; a < num_cells + 2; ++a)
      for (int b = 0; b < num_cells + 2; ++b)
        if (state_gap(ga, a, b) <= lim) ga.sys.out[a].insert(b);
  }

  /* propositions: one per region label, plus the reserved escape marker */
  for (const LabeledRegion& reg : regions) ga.preds.ap_out.intern(reg.label);
  const int nl = ga.preds.ap_out.size();
  ga.preds.ap_out.intern("violation");
  std::vector<std::vector<Box>> label_boxes(nl);
  for (const LabeledRegion& reg : regions) {
    int l = ga.preds.ap_out.require(reg.label);
    for (const Box& b : reg.boxes) label_boxes[l].push_back(b);
  }

  /* the letters a cell can show are exactly the label combinations its
   * points realize; region membership is a product of per-axis interval
   * tests, so sampling every region edge inside the cell plus a point
   * between each consecutive pair covers all combinations */
  ga.preds.state_preds.assign(num_cells + 2, {});
  for (int c = 0; c < num_cells; ++c) {
    const Box& cb = ga.cell_box[c];
    std::vector<Vec> reps(dim);
    for (int d = 0; d < dim; ++d) {
      Vec cuts = {cb.lo[d], cb.hi[d]};
      for (const auto& boxes : label_boxes)
        for (const Box& b : boxes) {
          cuts.push_back(std::clamp(b.lo[d], cb.lo[d], cb.hi[d]));
          cuts.push_back(std::clamp(b.hi[d], cb.lo[d], cb.hi[d]));
        }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      Vec rep = cuts;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        rep.push_back(0.5 * (cuts[i] + cuts[i + 1]));
      reps[d] = std::move(rep);
    }
    std::set<PredMask> masks;
    std::vector<std::size_t> pos(dim, 0);
    Vec p(dim);
    for (;;) {
      for (int d = 0; d < dim; ++d) p[d] = reps[d][pos[d]];
      PredMask mask = 0;
      for (int l = 0; l < nl; ++l)
        for (const Box& b : label_boxes[l])
          if (b.contains(p)) {
            mask |= PredMask(1) << l;
            break;
          }
      masks.insert(mask);
      int d = dim;
      for (; d > 0; --d) {
        if (++pos[d - 1] < reps[d - 1].size()) break;
        pos[d - 1] = 0;
      }
      if (d == 0) break;
    }
    ga.preds.state_preds[c].assign(masks.begin(), masks.end());
  }
  PredMask viol = PredMask(1) << nl;
  ga.preds.state_preds[ga.low_id] = {viol};
  ga.preds.state_preds[ga.high_id] = {viol};

  ga.preds.input_preds.assign(m, std::vector<PredMask>{0});

  ga.sys.validate();
  ga.preds.validate(ga.sys);
  return ga;
}

ContinuousEfrr induced_efrr(const GriddedAbstraction& ga) {
  auto p = std::make_shared<const GriddedAbstraction>(ga);
  ContinuousEfrr e;
  e.alpha = [p](const Vec& x) { return p->cells_at(x); };
  e.beta = [p](int j) {
    if (j < 0 || j >= static_cast<int>(p->input_reps.size()))
      throw ValidationError("unknown input id");
    return std::vector<Vec>{p->input_reps[j]};
  };
  e.gamma = [p](const Vec& y) { return p->outputs_at(y); };
  return e;
}

}  // namespace abocs
