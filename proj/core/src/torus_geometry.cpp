// SPDX-License-Identifier: MIT
#include "favard/torus_geometry.hpp"

#include <algorithm>
#include <map>
#include <numbers>

#include "favard/errors.hpp"

namespace favard {

double wrap_angle(double theta) {
  double w = theta - std::floor(theta);
  return w >= 1.0 ? 0.0 : w;
}

double arc_delta(double a, double b) {
  double d = wrap_angle(a - b);
  return d >= 0.5 ? d - 1.0 : d;
}

Point direction_vector(double theta) {
  const double t = wrap_angle(theta);
  return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

double project(double theta, Point p) { return dot(p, direction_vector(theta)); }

double project_perp(double theta, Point p) { return dot(p, direction_vector(theta + 0.25)); }

AngleInterval AngleInterval::from_bounds(double lo, double hi) {
  if (!(hi > lo)) throw PreconditionError("AngleInterval: empty bounds");
  const double hw = std::min(0.5, 0.5 * (hi - lo));
  return {wrap_angle(0.5 * (lo + hi)), hw};
}

AngleInterval AngleInterval::dilate(double c) const {
  if (!(c > 0.0)) throw PreconditionError("AngleInterval::dilate: factor must be positive");
  return {center, std::min(0.5, half_width * c)};
}

AngleInterval AngleInterval::perp() const { return {wrap_angle(center + 0.25), half_width}; }

bool AngleInterval::contains(double theta) const {
  if (is_full()) return true;
  return std::fabs(arc_delta(theta, center)) <= half_width + kGeomTol;
}

TriadicInterval TriadicInterval::containing(double theta, int level) {
  if (level < 0 || level > 38) throw PreconditionError("TriadicInterval: level out of range");
  const double t = wrap_angle(theta);
  std::int64_t n = 1;
  for (int i = 0; i < level; ++i) n *= 3;
  auto k = static_cast<std::int64_t>(std::floor(t * static_cast<double>(n)));
  k = std::clamp<std::int64_t>(k, 0, n - 1);
  TriadicInterval r{level, k};
  if (t < r.lo() && k > 0) --r.index;
  if (t >= r.hi() && r.index + 1 < n) ++r.index;
  return r;
}

double TriadicInterval::length() const { return std::pow(3.0, -level); }
double TriadicInterval::lo() const { return static_cast<double>(index) * length(); }
double TriadicInterval::hi() const { return static_cast<double>(index + 1) * length(); }

TriadicInterval TriadicInterval::parent() const {
  if (level == 0) throw PreconditionError("TriadicInterval: the root has no parent");
  return {level - 1, index / 3};
}

std::array<TriadicInterval, 3> TriadicInterval::children() const {
  return {TriadicInterval{level + 1, 3 * index}, TriadicInterval{level + 1, 3 * index + 1},
          TriadicInterval{level + 1, 3 * index + 2}};
}

TriadicInterval TriadicInterval::ancestor(int at_level) const {
  if (at_level > level || at_level < 0) throw PreconditionError("TriadicInterval: bad ancestor level");
  TriadicInterval r = *this;
  while (r.level > at_level) r = r.parent();
  return r;
}

bool TriadicInterval::contains(double theta) const {
  const double t = wrap_angle(theta);
  return t >= lo() && t < hi();
}

bool TriadicInterval::contains(const TriadicInterval& other) const {
  if (other.level < level) return false;
  return other.ancestor(level) == *this;
}

bool TriadicInterval::disjoint(const TriadicInterval& other) const {
  return !contains(other) && !other.contains(*this);
}

bool direction_in(const AngleInterval& I, Point d) {
  if (I.half_width >= 0.25) return true;
  const double n = norm(d);
  const double s = std::sin(kTwoPi * I.half_width);
  return std::fabs(project_perp(I.center, d)) <= s * n + kGeomTol * n;
}

bool in_annulus(double r, double inner, double outer) {
  const double slack = 1.0 + kGeomTol;
  if (inner > 0.0) return r > inner * slack && r <= outer * slack;
  return r <= outer * slack;
}

double total_length(const std::vector<TriadicInterval>& family) {
  double s = 0.0;
  for (const auto& I : family) s += I.length();
  return s;
}

std::vector<TriadicInterval> maximal_intervals(std::vector<TriadicInterval> family) {
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());
  std::vector<TriadicInterval> out;
  for (const auto& I : family) {
    bool inside = false;
    for (const auto& K : family) {
      if (!(K == I) && K.contains(I)) {
        inside = true;
        break;
      }
    }
    if (!inside) out.push_back(I);
  }
  return out;
}

std::vector<TriadicInterval> coalesce(std::vector<TriadicInterval> family) {
  family = maximal_intervals(std::move(family));
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<TriadicInterval, int> count;
    for (const auto& I : family) {
      if (I.level > 0) ++count[I.parent()];
    }
    for (const auto& [P, c] : count) {
      if (c == 3) {
        family.push_back(P);
        changed = true;
      }
    }
    if (changed) family = maximal_intervals(std::move(family));
  }
  return family;
}

std::vector<AngleInterval> as_angle_set(const std::vector<TriadicInterval>& family) {
  std::vector<AngleInterval> out;
  out.reserve(family.size());
  for (const auto& I : family) out.push_back(I.as_interval());
  return out;
}

double overlap_length(const TriadicInterval& I, const std::vector<TriadicInterval>& family) {
  double s = 0.0;
  for (const auto& K : family) {
    if (I.contains(K)) {
      s += K.length();
    } else if (K.contains(I)) {
      s += I.length();
    }
  }
  return s;
}

bool cone_contains(Point apex, const AngleInterval& I, double inner, double outer, Point y) {
  const Point d = y - apex;
  const double r = norm(d);
  if (!in_annulus(r, inner, outer)) return false;
  if (r == 0.0) return true;
  return direction_in(I, d);
}

bool cone_contains(Point apex, const std::vector<AngleInterval>& dirs, double inner, double outer,
                   Point y) {
  const Point d = y - apex;
  const double r = norm(d);
  if (!in_annulus(r, inner, outer)) return false;
  if (r == 0.0) return !dirs.empty();
  return std::any_of(dirs.begin(), dirs.end(), [&](const AngleInterval& I) { return direction_in(I, d); });
}

bool in_cone(const ConeSpec& spec, Point y) {
  if (spec.inner < 0.0 || !(spec.outer > spec.inner)) {
    throw PreconditionError("in_cone: radii must satisfy 0 <= inner < outer");
  }
  for (const auto& I : spec.directions) {
    if (I.half_width > 0.25) {
      throw PreconditionError("in_cone: half-width above 1/4 breaks the characterization");
    }
  }
  return cone_contains(spec.apex, spec.directions, spec.inner, spec.outer, y);
}

double d_metric(const AngleInterval& I, Point x, Point y) {
  if (!(I.half_width > 0.0)) throw PreconditionError("d_metric: interval must have positive length");
  return distance(to_metric_frame(I, x), to_metric_frame(I, y));
}

double ball_in_cone_constant(double alpha) {
  if (!(alpha > 1.0)) throw PreconditionError("ball_in_cone_constant: alpha must exceed 1");
  return std::min(0.25, 0.25 * (alpha - 1.0));
}

double cone_in_cone_constant(double alpha) {
  if (!(alpha > 1.0)) throw PreconditionError("cone_in_cone_constant: alpha must exceed 1");
  return std::max(5.0, 4.0 / (alpha - 1.0));
}

double metric_comparison_constant(double c) {
  if (!(c >= 1.0)) throw PreconditionError("metric_comparison_constant: C must be at least 1");
  return std::sqrt((1.0 + std::numbers::pi * std::numbers::pi) * c * c + 2.0);
}

Point to_metric_frame(const AngleInterval& I, Point p) {
  return {project_perp(I.center, p) / I.length(), project(I.center, p)};
}

Point from_metric_frame(const AngleInterval& I, Point v) {
  const Point e = direction_vector(I.center);
  const Point ep = direction_vector(I.center + 0.25);
  return (I.length() * v.x1) * ep + v.x2 * e;
}

}  // namespace favard
