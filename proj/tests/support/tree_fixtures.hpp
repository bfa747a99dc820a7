// SPDX-License-Identifier: MIT
// Tree fixtures: atoms on one horizontal line, two half-lines with different
// very good directions, and the horizontal skeleton of the second 4-corners
// generation.
#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "favard/direction_tree.hpp"
#include "favard/projection_engine.hpp"

namespace favard::testing {

inline const TriadicInterval kVertical = TriadicInterval::containing(0.25, 4);

inline DiscreteMeasure line(int n, double x0 = 0.0, double x1 = 1.0) {
  DiscreteMeasure mu;
  for (int i = 0; i < n; ++i) mu.push({x0 + (x1 - x0) * (i + 0.5) / n, 0.0}, (x1 - x0) / n);
  return mu;
}

inline std::vector<std::size_t> all_ids(std::size_t n) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return ids;
}

inline TreeInput uniform_input(const DiscreteMeasure& mu, const TriadicInterval& j0) {
  TreeInput in;
  in.mu = mu;
  in.e0 = all_ids(mu.size());
  in.g2.assign(mu.size(), {j0});
  in.j0 = j0;
  in.eps = StageParams{}.eps();
  return in;
}

inline TreeInput two_direction_input() {
  DiscreteMeasure mu = line(48, 0.0, 0.4);
  const auto right = line(48, 0.6, 1.0);
  for (std::size_t i = 0; i < right.size(); ++i) mu.push(right.points[i], right.weights[i]);
  TreeInput in = uniform_input(mu, kVertical);
  const auto kids = kVertical.children();
  for (std::size_t i = 0; i < mu.size(); ++i) in.g2[i] = {mu.points[i].x1 < 0.5 ? kids[0] : kids[2]};
  return in;
}

struct FourCornersStages {
  DiscreteMeasure mu;
  GoodStages stages;
};

// Good directions of the horizontal skeleton part over G = [0.05, 0.20] in
// J_0 = [0, 1/3), turned a quarter so that they act as cone directions.
inline FourCornersStages four_corners_stages() {
  const auto h = split_parallel(skeleton(four_corners(2))).first;
  const auto base = discretize(h, default_pitch(h) * 4.0);
  const DirectionSet g{AngleInterval::from_bounds(0.05, 0.20)};
  double min_proj = kInf;
  for (int i = 0; i < 200; ++i) min_proj = std::min(min_proj, project_segments(h, 0.05 + 0.15 * (i + 0.5) / 200).measure());
  GoodDirectionParams gp;
  gp.kappa = 0.9 * min_proj / h.total_length();
  const auto sel = select_good_directions(h, base, TriadicInterval{1, 0}, g, gp);
  FourCornersStages out;
  out.mu = quarter_turn(sel.mu);
  StageParams sp;
  sp.m = sel.m;
  out.stages = build_good_stages(out.mu, sel.family.atoms, sel.family.intervals, sel.family.j0, sp);
  build_gstar(out.mu, out.stages);
  return out;
}

}  // namespace favard::testing
