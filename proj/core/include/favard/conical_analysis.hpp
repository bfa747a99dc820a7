// SPDX-License-Identifier: MIT
// Cone masses, truncated conical energies, bad scales and the selection of
// points with bounded projections and their good direction families.
#pragma once

#include <cstddef>
#include <vector>

#include "favard/exact_sum.hpp"
#include "favard/projection_engine.hpp"
#include "favard/set_models.hpp"
#include "favard/torus_geometry.hpp"

namespace favard {

// Finite union of closed arcs of directions.
using DirectionSet = std::vector<AngleInterval>;

// Adjacent triadic intervals fused into arcs; membership is unchanged.
DirectionSet merge_arcs(const std::vector<TriadicInterval>& family);
// Shifts every arc by 1/4.
DirectionSet perp(const DirectionSet& g);

double cone_mass(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double r, double big_r);
FixedSum cone_mass_exact(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double r,
                         double big_r);

// The integer k with rho^{k+1} < d <= rho^k under the annulus convention of
// the cones; d must be positive.
int scale_index(double d, double rho);

struct EnergyProfile {
  double rho = 0.5;
  int l = 0;
  int j = 0;
  // masses[k - l] = mu(X(x, G, rho^{k+1}, rho^k)) / rho^k.
  std::vector<FixedSum> masses;

  double m(int k) const;
  FixedSum total_exact() const;
  double total() const { return total_exact().value(); }
};

EnergyProfile conical_energy(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double rho,
                             int l, int j);
// Sum of m_k over all k >= l.
FixedSum energy_from(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double rho, int l);
// int_{rho^j}^{rho^l} mu(X(x, G, rho r, r)) dr / r^2 in closed form.
double energy_integral(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double rho, int l,
                       int j);
// The same integral by the midpoint rule in log r with n nodes.
double energy_integral_numeric(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double rho,
                               int l, int j, int n);
// int_0^inf mu(X(x, G, r)) dr / r^2, which equals the sum of w / |y - x|.
double cone_energy(const DiscreteMeasure& mu, Point x, const DirectionSet& g);
// int_0^R mu(X(x, G, r)) dr / r^2, the sum of w (1/|y - x| - 1/R) over atoms
// of the cone within distance R.
double cone_energy(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double radius);

struct BadScaleSet {
  AngleInterval j_interval;
  Point x;
  bool restricted = false;
  std::vector<int> scales;

  std::size_t count() const { return scales.size(); }
  bool contains(int k) const;
};

// Scales k in [l, j] whose annular cone X(x, J, rho^{k+1}, rho^k) meets `pts`.
BadScaleSet bad_scales(const std::vector<Point>& pts, Point x, const AngleInterval& j_interval,
                       double rho, int l, int j);
// Same, restricted to the atoms listed in `subset`.
BadScaleSet bad_scales(const DiscreteMeasure& mu, const std::vector<std::size_t>& subset, Point x,
                       const AngleInterval& j_interval, double rho, int l, int j);

struct BoundedProjectionSet {
  std::vector<std::size_t> ids;
  double mass = 0.0;
  double total_mass = 0.0;
  double projection_measure = 0.0;
  double threshold = 0.0;
  // True when M >= C H(E) / H(pi_theta E).
  bool lemma_applies = false;
  // True when the selected mass reaches H(pi_theta E) / 2.
  bool lemma_holds = false;
};

inline constexpr double kWeakTypeConstant = 4.0;

// Atoms x of mu with mu_theta(x) <= M.
BoundedProjectionSet select_bounded_projection_set(const SegmentUnion& e, const DiscreteMeasure& mu,
                                                   double theta, double m,
                                                   double weak_constant = kWeakTypeConstant);

// Families of disjoint triadic intervals attached to points, with one witness
// angle per interval.
struct GoodDirectionFamily {
  TriadicInterval j0;
  double m = 0.0;
  std::vector<std::size_t> atoms;
  std::vector<std::vector<TriadicInterval>> intervals;
  std::vector<std::vector<double>> witnesses;

  std::size_t size() const { return atoms.size(); }
  double covered_length(std::size_t i) const { return total_length(intervals[i]); }
  // Throws InvariantError when a family is not disjoint or leaves j0.
  void validate() const;
};

struct GoodDirectionParams {
  double kappa = 0.5;
  double m_constant = kWeakTypeConstant;
  int depth = 6;
  double perp_cutoff = kDefaultPerpCutoff;
  int workers = 1;
};

struct GoodDirectionSelection {
  DiscreteMeasure mu;
  GoodDirectionFamily family;
  std::vector<TriadicInterval> cells;
  double measured_g = 0.0;
  double m = 0.0;
  double mass_fraction = 0.0;
  double min_cover_ratio = 0.0;
  // max over E' of the energy in G(x)^perp divided by M H(G).
  double energy_constant = 0.0;
  // max over E' of the energy divided by the integral of the projected
  // densities over G(x).
  double density_constant = 0.0;
  bool mass_ok = false;
  bool cover_ok = false;
  bool witness_ok = false;
};

// Covers G by the triadic cells of the given depth whose centers lie in G,
// samples mu_theta at each cell center and keeps, for every atom, the cells
// where it is at most M = C / kappa. Throws PreconditionError naming the
// angle when H(pi_theta E) <= kappa H(E) at a sampled angle.
GoodDirectionSelection select_good_directions(const SegmentUnion& e, const DiscreteMeasure& mu,
                                              const TriadicInterval& j0, const DirectionSet& g,
                                              const GoodDirectionParams& params);

}  // namespace favard
