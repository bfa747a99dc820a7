// SPDX-License-Identifier: MIT
// Angles on the torus T = R/Z, triadic intervals, projections, two-sided cones
// and the anisotropic metrics d_I.
//
// Angles are measured in turns: theta in [0,1) stands for the unit vector
// (cos 2*pi*theta, sin 2*pi*theta).
#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <vector>

namespace favard {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Absolute tolerance used by the closed geometric predicates.
inline constexpr double kGeomTol = 1e-12;

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Point operator-(Point a, Point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Point operator*(double s, Point a) { return {s * a.x1, s * a.x2}; }
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(Point a) { return std::hypot(a.x1, a.x2); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Representative of theta in [0,1).
double wrap_angle(double theta);
// Signed shortest arc from b to a, in [-1/2, 1/2).
double arc_delta(double a, double b);
inline double perp(double theta) { return wrap_angle(theta + 0.25); }

// e_theta.
Point direction_vector(double theta);
// pi_theta(p) = p . e_theta.
double project(double theta, Point p);
// pi_theta^perp(p) = pi_{theta + 1/4}(p).
double project_perp(double theta, Point p);

// Closed arc [center - half_width, center + half_width] on T.
struct AngleInterval {
  double center = 0.0;
  double half_width = 0.5;

  static AngleInterval from_bounds(double lo, double hi);

  double length() const { return 2.0 * half_width; }
  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
  bool is_full() const { return half_width >= 0.5; }
  // Same center, length scaled by c and capped at 1.
  AngleInterval dilate(double c) const;
  AngleInterval perp() const;
  bool contains(double theta) const;
};

// [k 3^-j, (k+1) 3^-j) on T.
struct TriadicInterval {
  int level = 0;
  std::int64_t index = 0;

  static TriadicInterval root() { return {0, 0}; }
  static TriadicInterval containing(double theta, int level);

  double length() const;
  double lo() const;
  double hi() const;
  double center() const { return lo() + 0.5 * length(); }

  TriadicInterval parent() const;
  std::array<TriadicInterval, 3> children() const;
  TriadicInterval middle_child() const { return {level + 1, 3 * index + 1}; }
  TriadicInterval ancestor(int at_level) const;

  AngleInterval as_interval() const { return {center(), 0.5 * length()}; }
  AngleInterval dilate(double c) const { return as_interval().dilate(c); }

  // Half-open membership.
  bool contains(double theta) const;
  // other is a subset of *this.
  bool contains(const TriadicInterval& other) const;
  bool disjoint(const TriadicInterval& other) const;

  friend bool operator==(const TriadicInterval&, const TriadicInterval&) = default;
  // Position of the left endpoint on T first, then coarser before finer.
  friend std::strong_ordering operator<=>(const TriadicInterval& a, const TriadicInterval& b) {
    std::int64_t ia = a.index;
    std::int64_t ib = b.index;
    for (int l = a.level; l < b.level; ++l) ia *= 3;
    for (int l = b.level; l < a.level; ++l) ib *= 3;
    if (auto c = ia <=> ib; c != 0) return c;
    return a.level <=> b.level;
  }
};

// Disjoint triadic families.
double total_length(const std::vector<TriadicInterval>& family);
// Members not contained in another member, sorted and deduplicated.
std::vector<TriadicInterval> maximal_intervals(std::vector<TriadicInterval> family);
// Replaces every complete triple of siblings by its parent, repeatedly.
std::vector<TriadicInterval> coalesce(std::vector<TriadicInterval> family);
std::vector<AngleInterval> as_angle_set(const std::vector<TriadicInterval>& family);
// Length of the intersection of a triadic interval with a disjoint family.
double overlap_length(const TriadicInterval& I, const std::vector<TriadicInterval>& family);

// Radial window of the truncated cones: inner < r <= outer, or 0 <= r <= outer
// when inner == 0, with relative slack kGeomTol on both radii.
bool in_annulus(double r, double inner, double outer);

// True when the line through 0 spanned by d has its direction in I
// (the two-sided test |pi_I^perp(d)| <= sin(pi H(I)) |d|).
bool direction_in(const AngleInterval& I, Point d);

// Membership of y in X(apex, I, inner, outer): the direction test above plus
// the radial window inner < |y - apex| <= outer. With inner == 0 the apex
// itself belongs to the cone.
bool cone_contains(Point apex, const AngleInterval& I, double inner, double outer, Point y);
bool cone_contains(Point apex, const std::vector<AngleInterval>& dirs, double inner,
                   double outer, Point y);

struct ConeSpec {
  Point apex;
  std::vector<AngleInterval> directions;
  double inner = 0.0;
  double outer = kInf;
};

// Cone membership through the algebraic characterization; every direction interval
// of the cone must have half-width at most 1/4.
bool in_cone(const ConeSpec& spec, Point y);

// d_I(x, y) = (H(I)^-2 |pi_I^perp(x - y)|^2 + |pi_I(x - y)|^2)^(1/2).
double d_metric(const AngleInterval& I, Point x, Point y);
// Coordinates in which d_I is Euclidean: (pi_I^perp(p) / H(I), pi_I(p)).
Point to_metric_frame(const AngleInterval& I, Point p);
// Inverse of to_metric_frame; the composition of the scaling (v1,v2) ->
// (H(I) v1, v2) and the rotation sending (1,0) to e_{I^perp} and (0,1) to e_I.
Point from_metric_frame(const AngleInterval& I, Point v);

// X(x, alpha I, r) lies in B_I(x, kConeBallConstant alpha r).
inline constexpr double kConeBallConstant = 8.0;
// c(alpha) such that B_I(y, c r) lies in X(x, alpha I, r/2, 4r) whenever y is in
// X(x, I, r, 2r). Valid for alpha > 1 and alpha H(I) <= 1/4.
double ball_in_cone_constant(double alpha);
// C(alpha) such that X(x, I, r, R) lies in X(y, alpha I, r/2, 2R) whenever
// R > r > C d_I(x, y). Valid for alpha > 1 and alpha H(I) <= 1/4.
double cone_in_cone_constant(double alpha);
// K(C) with d_I <= K d_J whenever I lies in CJ and J lies in CI.
double metric_comparison_constant(double c);

}  // namespace favard
