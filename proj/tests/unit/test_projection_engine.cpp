// SPDX-License-Identifier: MIT
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "favard/errors.hpp"
#include "favard/projection_engine.hpp"

using namespace favard;

namespace {

SegmentUnion unit_segment() { return SegmentUnion{{Segment{{0, 0}, {1, 0}}}, 0.0}; }

SegmentUnion stacked(int n) {
  SegmentUnion e;
  for (int i = 0; i < n; ++i) e.segments.push_back({{0, 0.1 * i}, {1, 0.1 * i}});
  return e;
}

double brute_maximal(const PiecewiseConstDensity& nu, double t) {
  double best = 0.0;
  for (int k = 1; k <= 10000; ++k) {
    const double r = k / 5000.0;
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < nu.breaks.size(); ++i) {
      const double a = std::max(nu.breaks[i], t - r);
      const double b = std::min(nu.breaks[i + 1], t + r);
      if (b > a) mass += nu.values[i] * (b - a);
    }
    best = std::max(best, mass / (2.0 * r));
  }
  return best;
}

}  // namespace

TEST_CASE("exact projections") {
  CHECK(project_segments(unit_segment(), 0.0).measure() == doctest::Approx(1.0));
  CHECK(project_segments(unit_segment(), 0.25).measure() == doctest::Approx(0.0).epsilon(1e-15));
  const auto sk = skeleton(four_corners(1));
  const auto p = project_segments(sk, 0.0);
  REQUIRE(p.parts.size() == 2);
  CHECK(p.measure() == doctest::Approx(0.5));
  const auto merged = IntervalUnion1D::from_intervals({{0, 1}, {1, 2}, {3, 4}});
  CHECK(merged.parts.size() == 2);
  CHECK(merged.contains(1.5));
  CHECK_FALSE(merged.contains(2.5));
}

TEST_CASE("favard quadrature closed forms") {
  CHECK(std::fabs(favard_length(unit_segment(), 4096) - 2.0 / std::numbers::pi) < 1e-3);
  CHECK(std::fabs(favard_length(skeleton(four_corners(0)), 4096) - 4.0 / std::numbers::pi) < 2e-3);
  SegmentUnion gon;
  const double r = 0.7;
  for (int i = 0; i < 64; ++i) {
    const Point a = r * direction_vector(i / 64.0);
    const Point b = r * direction_vector((i + 1) / 64.0);
    gon.segments.push_back({a, b});
  }
  CHECK(std::fabs(favard_length(gon, 4096) - 2.0 * r) < 5e-3);
  CHECK_THROWS_AS(favard_length(unit_segment(), 1), PreconditionError);
  CHECK(favard_length(unit_segment(), 512, 3) == favard_length(unit_segment(), 512, 1));
}

TEST_CASE("favard is monotone and bounded") {
  const auto big = skeleton(four_corners(1));
  SegmentUnion part;
  part.segments.assign(big.segments.begin(), big.segments.begin() + 5);
  for (int n : {16, 257, 1024}) CHECK(favard_length(part, n) <= favard_length(big, n) + 1e-15);
  const double f = favard_length(big, 2048);
  CHECK(f <= std::min(big.total_length(), big.diameter()) + 1e-9);
}

TEST_CASE("buffon needles") {
  const auto mc = favard_mc(unit_segment(), 1000000, 42, 2);
  CHECK(std::fabs(mc.estimate - 2.0 / std::numbers::pi) <= 3.0 * mc.stderr_);
  CHECK(favard_mc(SegmentUnion{}, 1000, 1).estimate == 0.0);
  CHECK_THROWS_AS(favard_mc(unit_segment(), 10, 1), PreconditionError);
  const auto a = favard_mc(unit_segment(), 20000, 9, 1);
  const auto b = favard_mc(unit_segment(), 20000, 9, 4);
  CHECK(a.hits == b.hits);
}

TEST_CASE("pushforward densities") {
  const auto d0 = pushforward_density(unit_segment(), 0.0);
  REQUIRE(d0.values.size() == 1);
  CHECK(d0.values[0] == doctest::Approx(1.0));
  const auto d8 = pushforward_density(unit_segment(), 0.125);
  CHECK(d8.values[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(d8.breaks[1] - d8.breaks[0] == doctest::Approx(std::sqrt(0.5)));
  const auto d2 = pushforward_density(stacked(2), 0.0);
  CHECK(d2.values[0] == doctest::Approx(2.0));
  const auto dp = pushforward_density(unit_segment(), 0.25);
  REQUIRE(dp.atoms.size() == 1);
  CHECK(dp.atoms[0].second == doctest::Approx(1.0));
  const auto sk = skeleton(four_corners(2));
  for (double th : {0.0, 0.1, 0.25, 0.37}) {
    CHECK(pushforward_density(sk, th).total_mass() == doctest::Approx(sk.total_length()).epsilon(1e-12));
  }
}

TEST_CASE("maximal function fixtures") {
  const auto d = pushforward_density(unit_segment(), 0.0);
  CHECK(maximal_value(d, 0.5) == doctest::Approx(1.0));
  CHECK(std::fabs(maximal_value(d, 2.0) - brute_maximal(d, 2.0)) < 1e-9);
  PiecewiseConstDensity atom;
  atom.atoms = {{0.0, 1.0}};
  CHECK(maximal_value(atom, 1.0) == doctest::Approx(0.5));
  CHECK(std::isinf(maximal_value(atom, 0.0)));
  CHECK_THROWS_AS(maximal_value(PiecewiseConstDensity{}, 0.0), PreconditionError);
}

TEST_CASE("maximal function against the grid oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pos(0, 100);
  std::uniform_int_distribution<int> cnt(2, 6);
  std::uniform_real_distribution<double> val(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::set<int> b;
    const int n = cnt(rng);
    while (static_cast<int>(b.size()) < n) b.insert(pos(rng));
    PiecewiseConstDensity nu;
    for (int k : b) nu.breaks.push_back(k / 100.0);
    for (std::size_t i = 0; i + 1 < nu.breaks.size(); ++i) nu.values.push_back(val(rng));
    if (nu.is_zero()) continue;
    const double t = pos(rng) / 100.0;
    CHECK(std::fabs(maximal_value(nu, t) - brute_maximal(nu, t)) < 1e-9);
  }
}

TEST_CASE("mu theta") {
  CHECK(mu_theta(unit_segment(), 0.0, {0.5, 0}) == doctest::Approx(1.0));
  CHECK(mu_theta(stacked(4), 0.0, {0.5, 0.1}) == doctest::Approx(4.0));
  const double kappa = 0.01;
  const double v = mu_theta(unit_segment(), 0.25 - kappa, {0.5, 0});
  CHECK(v == doctest::Approx(1.0 / std::sin(kTwoPi * kappa)));
  CHECK(mu_theta_perp(unit_segment(), 0.75, {0.5, 0}) == doctest::Approx(1.0));
}

TEST_CASE("weak type level sets") {
  const auto sk = skeleton(four_corners(2));
  double worst = 0.0;
  for (double th : {0.05, 0.13, 0.31}) {
    const auto nu = pushforward_density(sk, th);
    const MaximalEvaluator eval(nu);
    const double lo = nu.breaks.front() - 1.0;
    const double hi = nu.breaks.back() + 1.0;
    const int n = 4000;
    for (double m : {2.0, 4.0, 8.0}) {
      int above = 0;
      for (int i = 0; i < n; ++i) above += eval(lo + (hi - lo) * (i + 0.5) / n) > m ? 1 : 0;
      const double level = (hi - lo) * above / n;
      worst = std::max(worst, level * m / nu.total_mass());
    }
  }
  MESSAGE("weak type constant observed: " << worst);
  CHECK(worst <= 3.0);
}
