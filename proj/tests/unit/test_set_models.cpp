// SPDX-License-Identifier: MIT
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "favard/errors.hpp"
#include "favard/projection_engine.hpp"
#include "favard/set_models.hpp"

using namespace favard;

namespace {

SegmentUnion unit_segment() { return SegmentUnion{{Segment{{0, 0}, {1, 0}}}, 0.0}; }

}  // namespace

TEST_CASE("four corners generations") {
  const auto k0 = four_corners(0);
  CHECK(k0.cells.size() == 1);
  CHECK(k0.side() == 1.0);
  const auto k1 = four_corners(1);
  REQUIRE(k1.cells.size() == 4);
  CHECK(k1.side() == 0.25);
  std::set<std::pair<std::int64_t, std::int64_t>> corners(k1.cells.begin(), k1.cells.end());
  CHECK(corners == std::set<std::pair<std::int64_t, std::int64_t>>{{0, 0}, {0, 3}, {3, 0}, {3, 3}});
  const auto k2 = four_corners(2);
  CHECK(k2.cells.size() == 16);
  std::set<double> xs;
  for (std::size_t i = 0; i < k2.cells.size(); ++i) xs.insert(k2.cell_box(i).lo.x1);
  CHECK(xs == std::set<double>{0.0, 3.0 / 16, 0.75, 15.0 / 16});
  CHECK_THROWS_AS(four_corners(13), ResourceError);
  CHECK_THROWS_AS(four_corners(-1), PreconditionError);
}

TEST_CASE("skeletons and parallel splits") {
  CHECK(skeleton(four_corners(0)).size() == 4);
  const DyadicSquareSet pair{1, {{0, 0}, {1, 0}}};
  CHECK(skeleton(pair).size() == 7);
  const auto s1 = skeleton(four_corners(1));
  CHECK(s1.size() == 16);
  for (const auto& s : s1.segments) CHECK(s.length() == doctest::Approx(0.25));
  const auto [h, v] = split_parallel(s1);
  CHECK(h.size() == 8);
  CHECK(v.size() == 8);
  CHECK(h.total_length() + v.total_length() == doctest::Approx(s1.total_length()));
  const auto [h0, v0] = split_parallel(skeleton(four_corners(0)));
  CHECK(h0.size() == 2);
  CHECK(v0.size() == 2);
  const auto [hh, vv] = split_parallel(unit_segment());
  CHECK(hh.size() == 1);
  CHECK(vv.empty());
  SegmentUnion oblique{{Segment{{0, 0}, {1, 1}}}, std::nullopt};
  CHECK_THROWS_AS(split_parallel(oblique), PreconditionError);
}

TEST_CASE("skeleton projections dominate the squares") {
  const auto k = four_corners(2);
  const auto sk = skeleton(k);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 64; ++i) {
    const double theta = u(rng);
    const Point e = direction_vector(theta);
    std::vector<std::pair<double, double>> raw;
    for (std::size_t c = 0; c < k.cells.size(); ++c) {
      const Box b = k.cell_box(c);
      double lo = kInf;
      double hi = -kInf;
      for (Point p : {b.lo, b.hi, Point{b.lo.x1, b.hi.x2}, Point{b.hi.x1, b.lo.x2}}) {
        lo = std::min(lo, dot(p, e));
        hi = std::max(hi, dot(p, e));
      }
      raw.emplace_back(lo, hi);
    }
    const double squares = IntervalUnion1D::from_intervals(raw).measure();
    CHECK(project_segments(sk, theta).measure() >= squares - 1e-9);
  }
}

TEST_CASE("discretization conserves length") {
  const auto sk = skeleton(four_corners(2));
  const auto mu = discretize(sk, default_pitch(sk));
  CHECK(mu.total_mass() == doctest::Approx(sk.total_length()).epsilon(1e-12));
  CHECK(mu.size() == sk.size() * 64);
  const auto sq = discretize(four_corners(2));
  CHECK(sq.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("ahlfors constant") {
  const double a = ahlfors_constant(unit_segment(), 4000, 11);
  CHECK(a >= 1.0);
  CHECK(a <= 2.0 + 1e-6);
  const double a_small = ahlfors_constant(unit_segment(), 100, 11);
  CHECK(a_small <= a);
  const SegmentUnion line{{Segment{{-50, 0}, {50, 0}}}, 0.0};
  const double ratio = ahlfors_constant(line, 1, 5);
  CHECK(ratio >= 1.0);
  const double sk = ahlfors_constant(skeleton(four_corners(3)), 2000, 1);
  const double sq = ahlfors_constant(four_corners(3), 2000, 1);
  CHECK(std::isfinite(sk));
  CHECK(std::isfinite(sq));
  MESSAGE("skeleton A = " << sk << ", squares A = " << sq);
}

TEST_CASE("hausdorff content estimator") {
  const double c = hausdorff_content(unit_segment(), 0.0);
  CHECK(c >= 0.5 - 1e-12);
  CHECK(c <= 1.0 + 1e-12);
  CHECK(hausdorff_content(std::vector<ContentPiece>{}, 0.0) == 0.0);
  const double box = hausdorff_content(skeleton(four_corners(0)), 0.0);
  CHECK(box <= std::sqrt(0.5) + 1e-2);
  CHECK(box > 0.0);
}

TEST_CASE("neighbourhoods on the dyadic grid") {
  const auto nb = neighborhood(unit_segment(), 0.125);
  CHECK(nb.level == 3);
  for (std::size_t i = 0; i < nb.cells.size(); ++i) {
    const Box b = nb.cell_box(i);
    CHECK(b.lo.x2 <= 0.125 + 1e-12);
    CHECK(b.hi.x2 >= -0.125 - 1e-12);
  }
  CHECK_FALSE(nb.cells.empty());
}

TEST_CASE("segment csv round trip and errors") {
  const auto e = parse_segments_csv("# header\n0,0,1,0\n\n0.5,0.25,0.5,1\n");
  CHECK(e.size() == 2);
  CHECK_THROWS_AS(parse_segments_csv("0,0,1\n"), IoError);
  CHECK_THROWS_AS(parse_segments_csv("0,0,0,0\n"), IoError);
  CHECK_THROWS_AS(parse_segments_csv(""), PreconditionError);
  try {
    parse_segments_csv("0,0,1,0\n1,x,2,3\n");
    FAIL("expected an error");
  } catch (const IoError& err) {
    CHECK(std::string(err.what()).find("line 2") != std::string::npos);
  }
  const std::string path = "test_set_models_roundtrip.csv";
  write_segments_csv(path, e);
  const auto back = read_segments_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back.segments[1].b == e.segments[1].b);
  std::remove(path.c_str());
}

TEST_CASE("square json round trip") {
  const auto k = four_corners(1);
  const std::string path = "test_set_models_squares.json";
  write_squares_json(path, k);
  CHECK(is_square_file(path));
  const auto back = read_squares_json(path);
  CHECK(back.level == k.level);
  CHECK(back.cells == k.cells);
  std::remove(path.c_str());
  CHECK_THROWS_AS(parse_squares_json("{\"level\": 1, \"cells\": [[5, 0]]}"), IoError);
  CHECK_THROWS_AS(parse_squares_json("{\"level\": 1, \"cells\": []}"), PreconditionError);
  CHECK_THROWS_AS(parse_squares_json("{nope"), IoError);
}
