// SPDX-License-Identifier: MIT
// The gap interval: given a thin ball B_0 whose dilate carries little mass and
// sees no cone points of F, and a point y of E just outside the cone at x,
// an interval of R of length comparable to lambda H(J) r that misses the
// perpendicular projection of F.
#pragma once

#include <cstddef>
#include <vector>

#include "favard/set_models.hpp"
#include "favard/torus_geometry.hpp"

namespace favard {

struct GapParams {
  double alpha = 2.0;
  double rho = 0.125;
  // Ahlfors constant A and measure bound M.
  double a = 1.0;
  double m = 256.0;
  double c_j = 1.0 / 16.0;
  double c_lambda = 1.0 / 256.0;
  double big_lambda = 64.0;
  double c_n = 8.0;
  double c_y = 0.25;

  double lambda() const { return c_lambda / (m * a); }
  int strips_n() const;
};

struct GapInstance {
  DiscreteMeasure mu;
  AngleInterval j;
  // Atom indices of F, of the ball center z_0 and of the point x in B_0 cap F.
  std::vector<std::size_t> f;
  std::size_t z0 = 0;
  std::size_t x = 0;
  double r = 0.0;
  double big_r = 0.0;
};

struct GapHypotheses {
  double j_ratio = 0.0;
  // mu(Lambda B_0) / (M H(J) r).
  double measure_ratio = 0.0;
  std::size_t cone_pairs = 0;
  // Atom index of the exterior witness y.
  std::size_t witness = 0;
};

struct GapResult {
  double lo = 0.0;
  double hi = 0.0;
  double lambda = 0.0;
  int n = 0;
  GapHypotheses hypotheses;
  std::size_t y = 0;
  std::size_t z_star = 0;
  int i_star = 0;
  // Strips visited by the beats chain before the nice one, counting the start.
  int chain_steps = 0;
  // |pi^perp(z_* - x)| / (H(J) r).
  double z_star_ratio = 0.0;
  // H(I) / (lambda H(J) r).
  double length_ratio = 0.0;
  bool disjoint = false;
  bool tube_empty = false;
  bool ball_inside = false;

  double length() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool ok() const { return disjoint && tube_empty && ball_inside; }
};

// Verifies the hypotheses, naming the first failed clause in a
// PreconditionError, then builds the strips of the tube between x and y,
// follows the beats chain to a nice strip and returns the projection of the
// thin tube beside z_*. Throws InvariantError when the chain leaves the
// strips without finding a nice one.
GapResult find_gap_interval(const GapInstance& inst, const GapParams& params);

}  // namespace favard
