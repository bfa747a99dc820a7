// SPDX-License-Identifier: MIT
#include <algorithm>
#include <string>

#include "doctest.h"
#include "favard/errors.hpp"
#include "favard/gap_interval.hpp"
#include "gap_fixtures.hpp"

using namespace favard;
using favard::testing::gap_fixture;
using favard::testing::GapFixtureOptions;

namespace {

std::string precondition_message(const GapInstance& g, const GapParams& p) {
  try {
    find_gap_interval(g, p);
  } catch (const PreconditionError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("gap below a single row") {
  const GapParams p;
  const auto g = gap_fixture(p, {});
  const auto res = find_gap_interval(g, p);
  CHECK(res.ok());
  CHECK(res.i_star == 0);
  CHECK(res.chain_steps == 1);
  CHECK(res.z_star == res.y);
  CHECK(res.y == g.f.size());
  const double px = project_perp(g.j.center, g.mu.points[g.x]);
  const double py = project_perp(g.j.center, g.mu.points[res.y]);
  CHECK(res.lo > std::min(px, py));
  CHECK(res.hi < std::max(px, py));
  CHECK(res.hypotheses.measure_ratio < 1.0);
}

TEST_CASE("gap intervals across seeds") {
  const GapParams p;
  double lo = kInf;
  double hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GapFixtureOptions o;
    o.seed = seed;
    o.chain = static_cast<int>(seed % 5);
    const auto res = find_gap_interval(gap_fixture(p, o), p);
    CHECK(res.ok());
    lo = std::min(lo, res.length_ratio);
    hi = std::max(hi, res.length_ratio);
  }
  MESSAGE("H(I) / (lambda H(J) r) in [" << lo << ", " << hi << "]");
  CHECK(lo > 0.1);
  CHECK(hi < 10.0);
}

TEST_CASE("beats chain walks to the last occupied strip") {
  const GapParams p;
  for (int m : {1, 3, 7}) {
    GapFixtureOptions o;
    o.chain = m;
    const auto res = find_gap_interval(gap_fixture(p, o), p);
    CHECK(res.i_star == m);
    CHECK(res.chain_steps == m + 1);
    CHECK(res.ok());
  }
}

TEST_CASE("missing exterior witness") {
  const GapParams p;
  GapFixtureOptions o;
  o.witness = false;
  const auto msg = precondition_message(gap_fixture(p, o), p);
  CHECK(msg.find("(iv)") != std::string::npos);
}

TEST_CASE("wide arc fails the first clause") {
  const GapParams p;
  auto g = gap_fixture(p, {});
  g.j.half_width *= 8.0;
  CHECK(precondition_message(g, p).find("(i)") != std::string::npos);
}

TEST_CASE("heavy ball fails the measure clause") {
  const GapParams p;
  auto g = gap_fixture(p, {});
  g.mu.weights[0] = 1.0;
  const auto msg = precondition_message(g, p);
  CHECK(msg.find("(iii)") != std::string::npos);
  CHECK(msg.find("mu(Lambda B_0)") != std::string::npos);
}

TEST_CASE("cone point of F fails the empty cone clause") {
  const GapParams p;
  auto g = gap_fixture(p, {});
  g.mu.push({0.0, 0.5 * g.r}, 1e-9);
  g.f.push_back(g.mu.size() - 1);
  const auto msg = precondition_message(g, p);
  CHECK(msg.find("(iii)") != std::string::npos);
  CHECK(msg.find("cone") != std::string::npos);
}
