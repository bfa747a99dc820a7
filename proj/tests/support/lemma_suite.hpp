// SPDX-License-Identifier: MIT
// Randomized checks of the cone and metric inclusions with the constants fixed
// in torus_geometry.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "favard/torus_geometry.hpp"

namespace favard::testing {

struct LemmaTally {
  std::string name;
  std::size_t configurations = 0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  // Largest observed ratio of the left side to the allowed bound.
  double worst = 0.0;
};

class LemmaSampler {
 public:
  explicit LemmaSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  Point point(double spread) { return {uniform(-spread, spread), uniform(-spread, spread)}; }

  // A point of X(x, I, inner, outer) with |y - x| drawn uniformly in the window.
  Point in_cone(Point x, const AngleInterval& I, double inner, double outer) {
    const double phi = I.center + I.half_width * uniform(-1.0, 1.0) + (uniform(0.0, 1.0) < 0.5 ? 0.5 : 0.0);
    const double r = inner + (outer - inner) * uniform(0.0, 1.0);
    return x + r * direction_vector(phi);
  }

  // A point z with d_I(y, z) < radius.
  Point in_metric_ball(Point y, const AngleInterval& I, double radius) {
    const double a = uniform(0.0, 1.0);
    const double s = radius * std::sqrt(uniform(0.0, 1.0)) * (1.0 - 1e-9);
    const Point v = to_metric_frame(I, y) + s * direction_vector(a);
    return from_metric_frame(I, v);
  }

 private:
  std::mt19937_64 rng_;
};

inline void record(LemmaTally& t, double ratio, bool ok) {
  ++t.samples;
  t.worst = std::max(t.worst, ratio);
  if (!ok) ++t.violations;
}

inline void record(LemmaTally& t, double ratio) { record(t, ratio, ratio <= 1.0); }

inline LemmaTally check_cone_in_ball(LemmaSampler& s, std::size_t configs, int samples) {
  LemmaTally t{"cone in ball"};
  for (std::size_t c = 0; c < configs; ++c) {
    const double alpha = s.uniform(1.0, 4.0);
    const AngleInterval I{s.uniform(0.0, 1.0), 0.5 * s.log_uniform(1e-4, 0.5 / alpha)};
    const AngleInterval wide{I.center, alpha * I.half_width};
    const Point x = s.point(10.0);
    const double r = s.log_uniform(1e-3, 10.0);
    ++t.configurations;
    for (int k = 0; k < samples; ++k) {
      const Point y = s.in_cone(x, wide, 0.0, r);
      if (!cone_contains(x, wide, 0.0, r, y)) continue;
      record(t, d_metric(I, x, y) / (kConeBallConstant * alpha * r));
    }
  }
  return t;
}

inline LemmaTally check_ball_in_cone(LemmaSampler& s, std::size_t configs, int samples) {
  LemmaTally t{"ball in cone"};
  for (std::size_t c = 0; c < configs; ++c) {
    const double alpha = s.uniform(1.0 + 1e-3, 2.0);
    const AngleInterval I{s.uniform(0.0, 1.0), 0.5 * s.log_uniform(1e-4, 0.25 / alpha)};
    const AngleInterval wide{I.center, alpha * I.half_width};
    const double cc = ball_in_cone_constant(alpha);
    const Point x = s.point(10.0);
    const double r = s.log_uniform(1e-3, 10.0);
    const Point y = s.in_cone(x, I, r, 2.0 * r);
    ++t.configurations;
    if (!cone_contains(x, I, r, 2.0 * r, y)) continue;
    for (int k = 0; k < samples; ++k) {
      const Point z = s.in_metric_ball(y, I, cc * r);
      const double dz = distance(x, z);
      const double bound = std::sin(std::numbers::pi * wide.length()) * dz;
      const double side = std::abs(project_perp(I.center, z - x));
      const bool inside = cone_contains(x, wide, 0.5 * r, 4.0 * r, z);
      record(t, side / bound, inside);
    }
  }
  return t;
}

inline LemmaTally check_cone_in_cone(LemmaSampler& s, std::size_t configs, int samples) {
  LemmaTally t{"cone in cone"};
  for (std::size_t c = 0; c < configs; ++c) {
    const double alpha = s.uniform(1.0 + 1e-3, 2.0);
    const AngleInterval I{s.uniform(0.0, 1.0), 0.5 * s.log_uniform(1e-4, 0.25 / alpha)};
    const AngleInterval wide{I.center, alpha * I.half_width};
    const double big_c = cone_in_cone_constant(alpha);
    const Point x = s.point(10.0);
    const double r = s.log_uniform(1e-3, 10.0);
    const double big_r = r * s.uniform(1.0 + 1e-6, 8.0);
    const Point y = s.in_metric_ball(x, I, r / big_c);
    ++t.configurations;
    for (int k = 0; k < samples; ++k) {
      const Point z = s.in_cone(x, I, r, big_r);
      if (!cone_contains(x, I, r, big_r, z)) continue;
      const double dz = distance(y, z);
      const double bound = std::sin(std::numbers::pi * wide.length()) * dz;
      const double side = std::abs(project_perp(I.center, z - y));
      const bool inside = cone_contains(y, wide, 0.5 * r, 2.0 * big_r, z);
      record(t, side / bound, inside);
    }
  }
  return t;
}

inline LemmaTally check_metric_comparison(LemmaSampler& s, std::size_t configs, int samples) {
  LemmaTally t{"metric comparison"};
  for (std::size_t c = 0; c < configs; ++c) {
    const double big_c = s.uniform(1.0, 4.0);
    const double hj = s.log_uniform(1e-4, 0.5 / big_c);
    const double hi = s.uniform(hj / big_c, std::min(big_c * hj, 0.5 / big_c));
    const double slack = std::max(0.0, std::min(big_c * hj - hi, big_c * hi - hj));
    const AngleInterval J{s.uniform(0.0, 1.0), 0.5 * hj};
    const AngleInterval I{wrap_angle(J.center + 0.5 * slack * s.uniform(-1.0, 1.0)), 0.5 * hi};
    const double k = metric_comparison_constant(big_c);
    ++t.configurations;
    for (int n = 0; n < samples; ++n) {
      const Point x = s.point(1.0);
      const Point y = s.point(1.0);
      const double di = d_metric(I, x, y);
      const double dj = d_metric(J, x, y);
      record(t, std::max(di / (k * dj), dj / (k * di)));
    }
  }
  return t;
}

inline LemmaTally check_metric_isometry(LemmaSampler& s, std::size_t configs, int samples) {
  LemmaTally t{"metric isometry"};
  for (std::size_t c = 0; c < configs; ++c) {
    const AngleInterval I{s.uniform(0.0, 1.0), 0.5 * s.log_uniform(1e-4, 1.0)};
    ++t.configurations;
    for (int n = 0; n < samples; ++n) {
      const Point x = s.point(5.0);
      const Point y = s.point(5.0);
      const double e = distance(x, y);
      const double d = d_metric(I, from_metric_frame(I, x), from_metric_frame(I, y));
      record(t, std::abs(d - e) / (1e-9 * std::max(1.0, e)));
    }
  }
  return t;
}

inline std::vector<LemmaTally> run_lemma_suite(std::uint64_t seed, std::size_t configs, int samples) {
  LemmaSampler s(seed);
  return {check_cone_in_ball(s, configs, samples), check_ball_in_cone(s, configs, samples),
          check_cone_in_cone(s, configs, samples), check_metric_comparison(s, configs, samples),
          check_metric_isometry(s, configs, samples)};
}

}  // namespace favard::testing
