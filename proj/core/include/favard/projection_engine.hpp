// SPDX-License-Identifier: MIT
// Exact projections of segment unions, Favard length by quadrature and by
// Buffon needles, pushforward densities and the exact maximal function.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "favard/set_models.hpp"

namespace favard {

// Sorted disjoint closed intervals.
struct IntervalUnion1D {
  std::vector<std::pair<double, double>> parts;

  double measure() const;
  bool contains(double t) const;
  // Builds the canonical form: sorted, with overlapping or touching
  // intervals merged.
  static IntervalUnion1D from_intervals(std::vector<std::pair<double, double>> raw);
};

// values[i] is the density on (breaks[i], breaks[i+1]); atoms are (t, mass)
// sorted by t.
struct PiecewiseConstDensity {
  std::vector<double> breaks;
  std::vector<double> values;
  std::vector<std::pair<double, double>> atoms;

  double total_mass() const;
  bool is_zero() const;
};

inline constexpr double kDefaultPerpCutoff = 1e-9;

IntervalUnion1D project_segments(const SegmentUnion& e, double theta);

// Midpoint rule (1/n) sum_i H(pi_{(i+1/2)/n}(E)).
double favard_length(const SegmentUnion& e, int n_angles, int workers = 1);
// The (theta, measure) samples used by favard_length.
std::vector<std::pair<double, double>> projection_profile(const SegmentUnion& e, int n_angles,
                                                          int workers = 1);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t needles = 0;
  std::uint64_t hits = 0;
};

// Buffon needle estimate: uniform (theta, t) over the lines meeting the
// bounding disk. Needles are split into fixed blocks with their own seeds so
// the result does not depend on the worker count.
McEstimate favard_mc(const SegmentUnion& e, std::uint64_t needle_count, std::uint64_t seed,
                     int workers = 1);

PiecewiseConstDensity pushforward_density(const SegmentUnion& e, double theta,
                                          double perp_cutoff = kDefaultPerpCutoff);

// Density of the continuous part at t, averaged across a breakpoint;
// +infinity at an atom.
double density_value(const PiecewiseConstDensity& nu, double t);

// sup_{r>0} nu((t-r, t+r)) / 2r, +infinity when an atom sits at t.
double maximal_value(const PiecewiseConstDensity& nu, double t);

// Evaluates the maximal function at many points sharing one density.
class MaximalEvaluator {
 public:
  explicit MaximalEvaluator(const PiecewiseConstDensity& nu);
  double operator()(double t) const;

 private:
  double continuous_cdf(double s) const;
  double density_left(double t) const;
  double density_right(double t) const;

  const PiecewiseConstDensity& nu_;
  std::vector<double> cdf_;
};

double mu_theta(const SegmentUnion& e, double theta, Point x, double perp_cutoff = kDefaultPerpCutoff);
double mu_theta_perp(const SegmentUnion& e, double theta, Point x,
                     double perp_cutoff = kDefaultPerpCutoff);

}  // namespace favard
