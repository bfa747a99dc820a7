// SPDX-License-Identifier: MIT
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "doctest.h"
#include "favard/direction_tree.hpp"
#include "favard/errors.hpp"
#include "favard/projection_engine.hpp"
#include "tree_fixtures.hpp"

using namespace favard;
using namespace favard::testing;

namespace {

void log_report(const std::string& name, const TreeReport& rep, double seconds) {
  for (const auto& c : rep.checks) {
    MESSAGE(name << " " << c.name << " ok=" << c.ok << " violations=" << c.violations << " constant=" << c.constant);
  }
  MESSAGE(name << " nodes=" << rep.tree_nodes << " roots=" << rep.roots << " bad=" << rep.bad
               << " shattered=" << rep.shattered << " seconds=" << seconds);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_CASE("stages of the full interval") {
  const auto mu = line(32);
  const auto st = build_good_stages(mu, all_ids(mu.size()), std::vector<TriadicFamily>(mu.size(), {kVertical}),
                                    kVertical, StageParams{});
  for (const auto& p : st.points) {
    CHECK(p.g0 == TriadicFamily{kVertical});
    CHECK(p.in_e0);
    CHECK(p.in_e00);
    CHECK(p.energy == 0.0);
  }
  CHECK(st.chebyshev_ok);
  CHECK(st.g0_ok);
  CHECK(st.g2_ok);
  CHECK(st.e0 == 1.0);
  CHECK(st.eps == doctest::Approx(1.0 / 256));
}

TEST_CASE("stages of a single child") {
  const auto mu = line(32);
  const auto child = kVertical.children()[0];
  auto st = build_good_stages(mu, all_ids(mu.size()), std::vector<TriadicFamily>(mu.size(), {child}), kVertical,
                              StageParams{});
  for (const auto& p : st.points) {
    CHECK(p.g0 == TriadicFamily{child});
    CHECK(p.g1 == p.g0);
    CHECK(p.g2 == TriadicFamily{child.middle_child()});
    CHECK_FALSE(p.in_e00);
  }
  CHECK(st.g1_large_ok);
  const auto star = build_gstar(mu, st);
  for (std::size_t i = 0; i < star.size(); ++i) {
    CHECK(star[i] == TriadicFamily{kVertical});
    CHECK(st.points[i].g11 == TriadicFamily{kVertical});
    CHECK(st.points[i].fin);
  }
  CHECK(st.assertion1_ok);
  CHECK(st.fin_alternative);
  CHECK(st.mass_fin == doctest::Approx(1.0));
}

TEST_CASE("coverage rule keeps a nearly full parent") {
  const auto mu = line(4);
  const auto kids = kVertical.children();
  TriadicFamily g;
  for (const auto& k : kids) {
    for (const auto& kk : k.children()) g.push_back(kk);
  }
  g.erase(g.begin() + 4);
  StageParams p;
  p.c_eps = 0.5;
  p.m = 1.0;
  const auto loose = build_good_stages(mu, all_ids(4), std::vector<TriadicFamily>(4, g), kVertical, p);
  CHECK(loose.points[0].g0 == TriadicFamily{kVertical});
  const auto tight = build_good_stages(mu, all_ids(4), std::vector<TriadicFamily>(4, g), kVertical, StageParams{});
  CHECK(tight.points[0].g0 == TriadicFamily{kids[0], kids[1].children()[0], kids[1].children()[2], kids[2]});
  CHECK(tight.g0_ok);
}

TEST_CASE("points of large energy keep their families") {
  auto mu = line(16);
  mu.push({mu.points[3].x1, 1e-4}, 1.0 / 16);
  const auto child = kVertical.children()[0];
  auto st = build_good_stages(mu, all_ids(mu.size()), std::vector<TriadicFamily>(mu.size(), {child}), kVertical,
                              StageParams{});
  CHECK(st.chebyshev_ok);
  CHECK_FALSE(st.points[3].in_e0);
  CHECK_FALSE(st.points[16].in_e0);
  CHECK(st.points[0].in_e0);
  build_gstar(mu, st);
  CHECK(st.points[3].gstar == TriadicFamily{child});
  CHECK(st.points[0].gstar == TriadicFamily{kVertical});
  CHECK(st.assertion1_ok);
  CHECK(st.growth_constant == kInf);
}

TEST_CASE("stage preconditions") {
  const auto mu = line(4);
  CHECK_THROWS_AS(build_good_stages(mu, {}, {}, kVertical, StageParams{}), PreconditionError);
  CHECK_THROWS_AS(build_good_stages(mu, {0}, {{TriadicInterval{4, 0}}}, kVertical, StageParams{}), PreconditionError);
  const auto kid = kVertical.children()[0];
  CHECK_THROWS_AS(build_good_stages(mu, {0}, {{kid, kid.children()[0]}}, kVertical, StageParams{}), PreconditionError);
}

TEST_CASE("good directions at a scale") {
  DiscreteMeasure mu;
  const double rho = 0.125;
  const int k = 2;
  const TriadicInterval I = kVertical.children()[0];
  mu.push({0.0, 0.0}, 0.5);
  const Point y = from_metric_frame(I.as_interval(), to_metric_frame(I.as_interval(), {0.0, 0.0}) + Point{5 * std::pow(rho, k), 0.0});
  mu.push(y, 0.5);
  TreeInput in;
  in.mu = mu;
  in.j0 = kVertical;
  in.e0 = {0, 1};
  in.g2 = {{I.children()[2]}, {I}};
  CHECK(d_metric(I.as_interval(), mu.points[0], mu.points[1]) == doctest::Approx(5 * std::pow(rho, k)));
  CHECK(good_at_scale(in, mu.points[0], k) == TriadicFamily{I});
  CHECK(good_at_scale(in, mu.points[0], 12) == TriadicFamily{I.children()[2]});
  in.e0.clear();
  in.g2.clear();
  CHECK(good_at_scale(in, mu.points[0], k).empty());
}

TEST_CASE("single line tree has no shattering") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto in = uniform_input(line(128), kVertical);
  const auto t = build_tree(in);
  CHECK(std::none_of(t.nodes.begin(), t.nodes.end(), [](const TreeNode& n) { return n.tag != NodeTag::Good; }));
  CHECK(t.roots == t.generation(0));
  for (std::size_t i : t.tree) CHECK(t.nodes[i].cube.interval == kVertical);
  const auto rep = check_tree(t);
  log_report("single-line", rep, seconds_since(t0));
  CHECK(rep.ok());
  CHECK(rep.bad == 0);
  CHECK(rep.shattered == 0);
  CHECK(rep.packing.roots_sum == doctest::Approx(kVertical.length()));
  CHECK(rep.packing.bad_sum == 0.0);
  CHECK(seconds_since(t0) < 60.0);
}

TEST_CASE("empty E0 gives an empty tree") {
  auto in = uniform_input(line(8), kVertical);
  in.e0.clear();
  in.g2.clear();
  const auto t = build_tree(in);
  CHECK(t.tree.empty());
  CHECK(collect_bad_cubes(t).empty());
  const auto s = packing_sums(t, {});
  CHECK(s.roots_sum == 0.0);
  CHECK(s.bad_sum == 0.0);
}

TEST_CASE("two-direction tree shatters") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto in = two_direction_input();
  const auto t = build_tree(in);
  const auto rep = check_tree(t);
  log_report("two-direction", rep, seconds_since(t0));
  CHECK(rep.shattered >= 1);
  CHECK(t.roots.size() > t.generation(0).size());
  bool strict = false;
  for (std::size_t r : t.roots) strict = strict || t.nodes[r].cube.interval.level > kVertical.level;
  CHECK(strict);
  CHECK(rep.ok());
  const double base = kVertical.length() * in.mu.total_mass();
  CHECK(rep.packing.roots_sum > base);
  CHECK(rep.packing.roots_sum < base / in.eps);
  CHECK(seconds_since(t0) < 60.0);
}

TEST_CASE("four corners skeleton tree") {
  const auto t0 = std::chrono::steady_clock::now();
  auto [mu, st] = four_corners_stages();
  CHECK(st.chebyshev_ok);
  CHECK(st.g0_ok);
  CHECK(st.g2_ok);
  CHECK(st.g1_large_ok);
  CHECK(st.assertion1_ok);
  MESSAGE("four-corners stages E0=" << st.e0 << " E2=" << st.e2 << " |E_0|=" << st.e0_count()
                                    << " growth=" << st.growth_constant << " energy ratio=" << st.energy_ratio);
  const auto t = build_tree(tree_input(mu, st, 0.125, 5));
  const auto rep = check_tree(t);
  log_report("four-corners", rep, seconds_since(t0));
  CHECK(rep.tree_nodes > 0);
  CHECK(rep.ok());
  CHECK(rep.packing.roots_ok);
  CHECK(seconds_since(t0) < 60.0);
}

TEST_CASE("a close vertical neighbour makes the cube bad") {
  auto mu = line(64);
  const int k = 1;
  mu.push({mu.points[20].x1, 0.5 * std::pow(0.125, k)}, 1.0 / 64);
  const auto t = build_tree(uniform_input(mu, kVertical));
  const auto bad = collect_bad_cubes(t);
  bool found = false;
  for (std::size_t q : bad) {
    const auto& n = t.nodes[q];
    found = found || (n.generation == k && std::binary_search(n.cube.atoms.begin(), n.cube.atoms.end(), std::size_t{64}));
  }
  CHECK(found);
}

TEST_CASE("propagation from the full interval stops at once") {
  const auto mu = line(16);
  const std::vector<TriadicFamily> g(mu.size(), {kVertical});
  const std::vector<std::vector<double>> w(mu.size(), {kVertical.center()});
  const auto res = propagate_good_directions(mu, all_ids(mu.size()), g, w, kVertical, StageParams{});
  CHECK(res.trace.size() == 1);
  CHECK(res.fin == all_ids(mu.size()));
  CHECK(res.tau == 1.0);
}

TEST_CASE("propagation from one child") {
  const auto mu = line(16);
  const auto child = kVertical.children()[2].children()[0];
  const std::vector<TriadicFamily> g(mu.size(), {child});
  const std::vector<std::vector<double>> w(mu.size(), {child.center()});
  const auto res = propagate_good_directions(mu, all_ids(mu.size()), g, w, kVertical, StageParams{});
  CHECK(res.trace.size() <= static_cast<std::size_t>(res.cap));
  for (std::size_t r = 1; r < res.trace.size(); ++r) CHECK(res.trace[r].hg_integral > res.trace[r - 1].hg_integral);
  CHECK(res.fin.size() == mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(res.families[i] == TriadicFamily{kVertical});
    CHECK(res.witnesses[i] == std::vector<double>{child.center()});
  }
}

TEST_CASE("propagation hypotheses") {
  const auto mu = line(4);
  const auto child = kVertical.children()[0];
  const std::vector<TriadicFamily> g(mu.size(), {child});
  CHECK_THROWS_AS(propagate_good_directions(mu, all_ids(4), g, std::vector<std::vector<double>>(4), kVertical,
                                            StageParams{}),
                  PreconditionError);
  CHECK_THROWS_AS(propagate_good_directions(mu, all_ids(4), g, std::vector<std::vector<double>>(4, {0.9}), kVertical,
                                            StageParams{}),
                  PreconditionError);
}

TEST_CASE("quarter turn round trip") {
  const Point p{0.3, -1.25};
  CHECK(quarter_turn(p).x1 == -1.25);
  CHECK(quarter_turn(p).x2 == -0.3);
  CHECK(quarter_turn_back(quarter_turn(p)).x1 == p.x1);
  CHECK(quarter_turn_back(quarter_turn(p)).x2 == p.x2);
}
