// SPDX-License-Identifier: MIT
// Staged good-direction families, their propagation, and the tree of
// anisotropic cubes adapted to the very good directions.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "favard/conical_analysis.hpp"
#include "favard/dyadic_lattices.hpp"
#include "favard/set_models.hpp"
#include "favard/torus_geometry.hpp"

namespace favard {

using TriadicFamily = std::vector<TriadicInterval>;

// (x1, x2) -> (x2, -x1). The cone about theta + 1/4 at x becomes the cone
// about theta at the image of x, so projection directions of E act as cone
// directions on the rotated set.
Point quarter_turn(Point p);
Point quarter_turn_back(Point p);
DiscreteMeasure quarter_turn(const DiscreteMeasure& mu);

struct StageParams {
  // Ahlfors constant A and maximal-function bound M.
  double a = 1.0;
  double m = kWeakTypeConstant;
  double c_eps = 1.0 / 64.0;
  double c_j = 1.0 / 16.0;
  // Members of G_1(x) deeper than depth_n levels below J_0 are dropped.
  int depth_n = 5;
  // Upper limit R of the radial integrals.
  double energy_radius = 1.0;
  int workers = 1;

  double eps() const { return c_eps / (a * m); }
};

struct PointStages {
  std::size_t atom = 0;
  TriadicFamily g;
  TriadicFamily g0;
  TriadicFamily g1;
  TriadicFamily g2;
  TriadicFamily g11;
  TriadicFamily gstar;
  // int_0^R mu(X(x, G(x), r)) dr / r^2.
  double energy = 0.0;
  double energy_star = 0.0;
  bool in_e0 = false;
  bool in_e00 = false;
  bool fin = false;
};

struct GoodStages {
  TriadicInterval j0;
  StageParams params;
  double eps = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  std::vector<PointStages> points;

  double mass_e = 0.0;
  double mass_e_prime = 0.0;
  double mass_e0 = 0.0;
  double mass_fin = 0.0;

  bool chebyshev_ok = false;
  bool g0_ok = false;
  bool g2_ok = false;
  // min over E_0 of H(G_1 cap G) / H(G).
  double g1_ratio_min = kInf;
  bool g1_large_ok = false;
  // Number of E_0 points removed by the depth truncation.
  std::size_t truncated = 0;

  bool gstar_built = false;
  bool assertion1_ok = false;
  // min over E_0 \ E_Fin of (H(G_*) / H(G) - 1) / eps.
  double growth_constant = kInf;
  double hg_integral = 0.0;
  double hgstar_integral = 0.0;
  bool fin_alternative = false;
  // (int H(G_*) - int H(G)) / (tau eps mu(E') H(J_0)).
  double measure_constant = 0.0;
  // int_{E'} energy(G_*) / (int_{E'} energy(G) + H(J_0) mu(E)).
  double energy_ratio = 0.0;

  std::size_t e0_count() const;
};

// The families G_0, G_1, G_2 and the sets E_0, E_00 for families G(x) given on
// the atoms listed in e_prime.
GoodStages build_good_stages(const DiscreteMeasure& mu, const std::vector<std::size_t>& e_prime,
                             const std::vector<TriadicFamily>& g, const TriadicInterval& j0,
                             const StageParams& params);
// Fills G_*(x), E_Fin and the assertion checks; returns the new families.
std::vector<TriadicFamily> build_gstar(const DiscreteMeasure& mu, GoodStages& stages);

struct PropagationRound {
  int round = 0;
  double hg_integral = 0.0;
  double mass_fin = 0.0;
  double energy_ratio = 0.0;
  double growth_constant = 0.0;
  std::size_t e0_size = 0;
};

struct PropagationResult {
  std::vector<TriadicFamily> families;
  std::vector<std::vector<double>> witnesses;
  std::vector<std::size_t> fin;
  std::vector<PropagationRound> trace;
  int cap = 0;
  double tau = 0.0;
  double delta = 0.0;
  // H(J_0) A M / c_J; the smallness hypothesis on J_0 asks for at most 1.
  double j0_ratio = 0.0;
  bool j0_small = false;
  // int_F energy(J_0) / (int_{E'} energy(G) + H(J_0) mu(E)).
  double final_energy_ratio = 0.0;
  GoodStages first;
};

// Iterates the stage construction with G <- G_* until mu(E_Fin) >= mu(E')/4.
// Throws PreconditionError when a family leaves J_0, overlaps itself or lacks
// a witness inside an interval, and InvariantError when the round cap
// ceil(12 / (eps tau)) is exceeded.
PropagationResult propagate_good_directions(const DiscreteMeasure& mu, const std::vector<std::size_t>& e_prime,
                                            const std::vector<TriadicFamily>& g,
                                            const std::vector<std::vector<double>>& witnesses,
                                            const TriadicInterval& j0, const StageParams& params);

// Data the tree is built from: the carrier, the points of E_0 with their very
// good families G_2, and the construction parameters.
struct TreeInput {
  DiscreteMeasure mu;
  std::vector<std::size_t> e0;
  std::vector<TriadicFamily> g2;
  TriadicInterval j0;
  double eps = 0.01;
  double rho = 0.125;
  int k_max = 5;
  int depth_n = 5;
  // Bound used by the bad-scale property; A max(E_0 / H(G_0), M).
  double e2 = 1.0;
  double m = kWeakTypeConstant;
  int workers = 1;
};

TreeInput tree_input(const DiscreteMeasure& mu, const GoodStages& stages, double rho, int k_max);

// G(x, k): maximal intervals I with I in G_2(y) for some y in E_0 cap B_I(x, 10 rho^k).
TriadicFamily good_at_scale(const TreeInput& in, Point x, int k);

enum class NodeTag { Good, End, Sh };

struct TreeNode {
  AnisoCube cube;
  int generation = 0;
  NodeTag tag = NodeTag::Good;
  // Shattering round j of the Good_j / End_j / Sh_j family.
  int round = 0;
  // Index of the generating tree node, or -1 for generation 0.
  long parent = -1;
  bool root = false;
  double mass = 0.0;
};

struct TreeDecomposition {
  TreeInput input;
  BaseLattice lattice;
  // Every cube examined by the construction, tagged; the tree consists of the
  // Good nodes.
  std::vector<TreeNode> nodes;
  std::vector<std::size_t> tree;
  std::vector<std::size_t> roots;
  int max_round = 0;

  std::vector<std::size_t> generation(int k) const;
};

// Throws InvariantError with diagnostics when shattering goes deeper than
// depth_n + 1 levels below J_0.
TreeDecomposition build_tree(const TreeInput& in);

struct PackingSums {
  double roots_sum = 0.0;
  double bad_sum = 0.0;
  double bound = 0.0;
  std::vector<double> per_root_bad;
  bool roots_ok = false;
};

// Q in the tree is Bad when X(x, 15 J_Q, rho^{k+1}, rho^k) meets E for an atom x of Q.
std::vector<std::size_t> collect_bad_cubes(const TreeDecomposition& t);
PackingSums packing_sums(const TreeDecomposition& t, const std::vector<std::size_t>& bad);

struct PropertyCheck {
  std::string name;
  bool ok = false;
  std::size_t violations = 0;
  // Achieved constant, where the property has one.
  double constant = 0.0;
  std::string detail;
};

struct TreeReport {
  std::vector<PropertyCheck> checks;
  PackingSums packing;
  std::size_t tree_nodes = 0;
  std::size_t roots = 0;
  std::size_t bad = 0;
  std::size_t shattered = 0;
  bool ok() const;
  const PropertyCheck& get(const std::string& name) const;
};

// Exhaustive verification of T1-T8, the nesting of tree children and the
// per-point comparison of truncated energies with Bad cube sums.
TreeReport check_tree(const TreeDecomposition& t);

}  // namespace favard
