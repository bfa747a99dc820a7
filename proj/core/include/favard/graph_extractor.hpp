// SPDX-License-Identifier: MIT
// Bad-scale reduction at rho = 1/2 and certification of Lipschitz graphs by
// the cone criterion.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "favard/set_models.hpp"
#include "favard/torus_geometry.hpp"

namespace favard {

// Scale k of y seen from x: 2^{-(k+1)} < |y - x| <= 2^{-k}, any integer k.
int dyadic_scale(double distance);

// #Bad_K(x, J) for every x in K, with K a list of atom indices of mu.
std::vector<int> bad_counts(const DiscreteMeasure& mu, const std::vector<std::size_t>& k, const AngleInterval& j,
                            int workers = 1);

struct ReduceResult {
  std::vector<std::size_t> kept;
  // Atoms in removal order.
  std::vector<std::size_t> removed;
  // max_x #Bad_K(x, J / 2) at the start and after every round; a round ends
  // when the maximum drops.
  std::vector<int> max_bad;
  double mass = 0.0;
  // alpha A^{-2} tau^2 with alpha = H(J) and tau = mu(F).
  double benchmark = 0.0;
  double benchmark_ratio = 0.0;
};

// Greedy: while some x in K has #Bad_K(x, J/2) > M - 1, remove the atom
// taking part in the most offending (apex, scale) incidences, ties to the
// lexicographically smallest point. Throws PreconditionError listing the atoms
// with #Bad_F(x, J) > M.
ReduceResult reduce_bad_scales(const DiscreteMeasure& mu, const std::vector<std::size_t>& f, const AngleInterval& j,
                               int m, double ahlfors = 1.0, int workers = 1);

struct LipschitzCheck {
  bool is_graph = false;
  double lip = 0.0;
  std::size_t violations = 0;
  // First pair in index order with y in X(x, J').
  std::pair<std::size_t, std::size_t> witness{0, 0};
};

// Exhaustive pairwise test of y not in X(x, J') over distinct atoms of K. lip
// is the largest |pi^perp Delta| / |pi Delta| in the frame of
// theta_0 = mid(J') + 1/4 and is infinite when the test fails.
LipschitzCheck verify_lipschitz(const std::vector<Point>& k, const AngleInterval& j_prime, int workers = 1);

struct GraphCertificate {
  double theta0 = 0.0;
  AngleInterval cone;
  double lip = 0.0;
  std::vector<std::size_t> atoms;
  // (t, f(t)) with t = pi_theta0 and f = pi_theta0^perp, sorted by t.
  std::vector<std::pair<double, double>> points;

  // Piecewise-linear interpolation, constant outside the hull.
  double operator()(double t) const;
  // Image of (t, f(t)) in the plane.
  Point embed(double t) const;
};

struct ExtractResult {
  GraphCertificate certificate;
  LipschitzCheck check;
  // Kept atoms after every halving.
  std::vector<std::vector<std::size_t>> stages;
  // lip H(J) / 2^{M_0}.
  double lip_constant = 0.0;
  double mass = 0.0;
};

// K_0 = F; K_i = reduce(K_{i-1}, 2^{1-i} J, M_0 - i + 1) until
// #Bad(x, 2^{-M_0} J) = 0 on the current set. Requires #Bad_F(x, J) <= M_0 and
// H(J) <= c_J.
ExtractResult extract_graph(const DiscreteMeasure& mu, const std::vector<std::size_t>& f, const AngleInterval& j,
                            int m0, double c_j = 1.0 / 16.0, int workers = 1);

}  // namespace favard
