// SPDX-License-Identifier: MIT
// Base lattices on atom sets, the anisotropic descendants D_{k+l}(P, J) built
// from them, and Whitney decompositions of open subsets of the line.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "favard/set_models.hpp"
#include "favard/torus_geometry.hpp"

namespace favard {

struct BaseCell {
  // Atom used as the cell center x_S.
  std::size_t center = 0;
  std::vector<std::size_t> atoms;
};

struct LatticeLevel {
  int m = 0;
  std::vector<BaseCell> cells;
  // cell_of[i] is the index in `cells` of the cell holding atom i.
  std::vector<std::size_t> cell_of;
};

enum class LatticeKind {
  // Half-open squares of side rho^m in the frame where d_J is Euclidean.
  Grid,
  // Nested maximal sigma rho^m separated nets with sigma = (1 - rho) / rho;
  // every cell S of level m satisfies E cap B(x_S, rho^m) in S in B(x_S, rho^{m-1}).
  Net,
};

// A nested sequence of partitions of a finite atom set, one per level m in
// [m_lo, m_hi]. rho must be 1/b for an integer b >= 2.
class BaseLattice {
 public:
  static BaseLattice grid(const std::vector<Point>& atoms, const AngleInterval& frame, double rho,
                          int m_lo, int m_hi);
  static BaseLattice net(const std::vector<Point>& atoms, double rho, int m_lo, int m_hi);

  LatticeKind kind() const { return kind_; }
  double rho() const { return rho_; }
  int m_lo() const { return m_lo_; }
  int m_hi() const { return m_hi_; }
  const std::vector<Point>& atoms() const { return atoms_; }
  const AngleInterval& frame() const { return frame_; }
  // Throws ResourceError outside [m_lo, m_hi].
  const LatticeLevel& level(int m) const;

 private:
  LatticeKind kind_ = LatticeKind::Grid;
  double rho_ = 0.5;
  int m_lo_ = 0;
  int m_hi_ = 0;
  AngleInterval frame_;
  std::vector<Point> atoms_;
  std::vector<LatticeLevel> levels_;
};

// Grid cells of side rho^m in the frame of J, centered on the atom nearest to
// the geometric cell center (ties broken lexicographically).
LatticeLevel base_cells(const std::vector<Point>& atoms, const AngleInterval& j_interval, double rho,
                        int m);

// The unique m with H(J) rho^{s+2} < 5 rho^m <= H(J) rho^{s+1}.
int side_level(double length_j, int s, double rho);

struct AnisoCube {
  std::vector<std::size_t> atoms;
  // Atom index of x_Q.
  std::size_t center = 0;
  int level = 0;
  TriadicInterval interval;
  // Base level m whose cells make up the cube.
  int base_level = 0;
  std::vector<std::size_t> base_cells;

  // The ball B_Q = B_{J_Q}(x_Q, 4 rho^k) contains every atom of the cube.
  double ball_radius(double rho) const;
};

// D_{k+l}(P, J): P is a sorted list of atom indices that is a union of base
// cells at the level given by the side rule for its own (J_P, k).
std::vector<AnisoCube> descend(const BaseLattice& lattice, const std::vector<std::size_t>& p,
                               const TriadicInterval& j_interval, int k, int l);
// Div(P, J) for a child interval J of J_P.
std::vector<AnisoCube> shatter(const BaseLattice& lattice, const AnisoCube& p,
                               const TriadicInterval& j_child);
// Ch(P, J_P).
std::vector<AnisoCube> children(const BaseLattice& lattice, const AnisoCube& p);

struct DescendReport {
  bool partition = false;
  bool separated = false;
  bool inner_ball = false;
  bool outer_ball = false;
  // max over cubes of max d_J(a, x_Q) / rho^{k+l}.
  double max_outer_ratio = 0.0;
  // min over cubes of the smallest d_J(a, x_Q) / rho^{k+l} among atoms of P
  // outside Q.
  double min_inner_ratio = kInf;
  bool ok() const { return partition && separated && inner_ball && outer_ball; }
};

// Exact checks of the partition, the net separation and the 0.5 / 4 sandwich.
DescendReport check_descend(const BaseLattice& lattice, const std::vector<std::size_t>& p,
                            const std::vector<AnisoCube>& cubes, const TriadicInterval& j_interval,
                            int scale);

// [j 2^-n, (j+1) 2^-n).
struct DyadicInterval {
  int n = 0;
  std::int64_t j = 0;

  double length() const;
  double lo() const;
  double hi() const;
  DyadicInterval parent() const;
  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

// Finite union of open intervals; infinite endpoints are allowed.
struct OpenSet {
  std::vector<std::pair<double, double>> parts;

  // Sorts and merges overlapping parts; throws PreconditionError when the
  // union is all of R.
  static OpenSet from_intervals(std::vector<std::pair<double, double>> raw);
  bool contains(double t) const;
  // True when [lo, hi) lies in one component.
  bool contains_half_open(double lo, double hi) const;
};

struct WhitneyDecomposition {
  OpenSet u;
  std::vector<DyadicInterval> intervals;
  // Parts of U inside the window that were left out: collars of width below
  // min_length at the finite endpoints, and cut pieces at the window edges.
  std::vector<std::pair<double, double>> residual;
  double min_length = 0.0;
  double window = 0.0;
};

// Maximal dyadic intervals I with 3I in U, enumerated inside [-window, window]
// down to length min_length.
WhitneyDecomposition whitney(const OpenSet& u, double min_length, double window);

struct WhitneyReport {
  bool disjoint = false;
  bool covers = false;
  bool triple_inside = false;
  bool parent_triple_outside = false;
  bool ok() const { return disjoint && covers && triple_inside && parent_triple_outside; }
};

// Exact verification: intervals and residual pieces tile U cap window, and
// every interval satisfies 3I in U and 3 parent(I) not in U.
WhitneyReport check_whitney(const WhitneyDecomposition& w);

}  // namespace favard
