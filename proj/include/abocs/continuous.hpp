#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "abocs/system.hpp"

namespace abocs {

using Vec = std::vector<double>;

/* Closed axis-aligned hyperrectangle. */
struct Box {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x) const;
  Vec center() const;
  Vec radius() const;
  void validate() const;
};

/* Sampled disturbed dynamics: a vector field under a finite list of
 * representative input vectors, a componentwise disturbance radius, and a
 * componentwise growth matrix bounding the field's state sensitivity. The
 * initial set is a box, or the whole space when absent. */
struct ControlSystem {
  int dim = 0;
  std::optional<Box> init;
  std::vector<Vec> inputs;
  Vec dist;
  std::vector<Vec> growth;
  std::function<Vec(const Vec&, const Vec&)> field;

  void validate() const;
};

enum class OutputMode { Tiles, Noisy };

/* Gridding of the region of interest. Tile outputs use their own coarser
 * grid over the same region; noisy outputs reuse the state grid and blur
 * membership by eps in the max norm. */
struct GridSpec {
  Box theta;
  Vec eta;
  double tau = 0;
  int rk_steps = 10;
  OutputMode mode = OutputMode::Tiles;
  Vec out_eta;
  double eps = 0;

  void validate(int dim) const;
};

struct LabeledRegion {
  std::string label;
  std::vector<Box> boxes;
};

/* Finite abstraction of a gridded control system: closed cells over the
 * region of interest plus two absorbing overflow states (one per escape
 * direction), with outputs and predicates lifted by intersection. Leaving
 * the region is marked by the reserved `violation` proposition. */
struct GriddedAbstraction {
  FiniteSystem sys;
  PredicateMaps preds;
  GridSpec grid;
  std::vector<Vec> input_reps;
  std::vector<Box> cell_box;  // per in-grid state
  int low_id = -1, high_id = -1;
  std::vector<Box> tile_box;  // tiles mode, per output but the last
  int out_of_range = -1;      // tiles mode reserved output

  /* closed-cell membership; overflow ids for points outside the region */
  IdSet cells_at(const Vec& x) const;
  /* abstract outputs consistent with a concrete output point */
  IdSet outputs_at(const Vec& y) const;
};

/* Hyperrectangle containing every endpoint of the disturbed flow started
 * anywhere in `cell` under input u: the nominal center and the cell radius
 * are integrated jointly (fixed-step RK4; the radius grows by L*r + w).
 * Zero time returns the cell itself. Divergence shows up as non-finite
 * bounds; the caller maps those to overflow. */
Box reach_overapprox(const ControlSystem& cs, const Box& cell, const Vec& u,
                     double tau, int steps = 10);

/* One sampling period of the disturbed dynamics, the disturbance held
 * constant on each of the `steps` RK4 substeps. w lists one disturbance
 * vector per substep. */
Vec simulate_step(const ControlSystem& cs, Vec x, const Vec& u,
                  const std::vector<Vec>& w, double tau, int steps);

/* Grid abstraction over the region of interest; `jobs` > 1 splits the
 * per-cell transition work across threads (the result is identical). */
GriddedAbstraction build_abstraction(const ControlSystem& cs,
                                     const GridSpec& grid,
                                     const std::vector<LabeledRegion>& regions,
                                     int jobs = 1);

/* The relation triple the construction induces: cell membership, identity
 * on representative inputs, and tile (or blurred cell) membership. */
struct ContinuousEfrr {
  std::function<IdSet(const Vec&)> alpha;
  std::function<std::vector<Vec>(int)> beta;
  std::function<IdSet(const Vec&)> gamma;
};

ContinuousEfrr induced_efrr(const GriddedAbstraction& ga);

}  // namespace abocs
