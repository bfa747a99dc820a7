// SPDX-License-Identifier: MIT
// Acceptance runner: one pass/fail line per criterion. With arguments, only
// the listed criteria run. The exit status is nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "favard/conical_analysis.hpp"
#include "favard/direction_tree.hpp"
#include "favard/dyadic_lattices.hpp"
#include "favard/gap_interval.hpp"
#include "favard/graph_extractor.hpp"
#include "favard/projection_engine.hpp"
#include "gap_fixtures.hpp"
#include "json.hpp"
#include "lemma_suite.hpp"
#include "tree_fixtures.hpp"

using namespace favard;
using namespace favard::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixture(const std::string& name) { return std::string(FAVARD_FIXTURE_DIR) + "/" + name; }

SegmentUnion unit_segment() { return SegmentUnion{{Segment{{0, 0}, {1, 0}}}, 0.0}; }

void favard_closed_forms(Outcome& o) {
  const auto t0 = Clock::now();
  const double seg = favard_length(unit_segment(), 4096);
  const double seg_time = seconds_since(t0);
  const double square = favard_length(skeleton(four_corners(0)), 4096);
  SegmentUnion gon;
  const double r = 0.7;
  for (int i = 0; i < 64; ++i) gon.segments.push_back({r * direction_vector(i / 64.0), r * direction_vector((i + 1) / 64.0)});
  const double g = favard_length(gon, 4096);
  const double e1 = std::abs(seg - 2.0 / std::numbers::pi);
  const double e2 = std::abs(square - 4.0 / std::numbers::pi);
  const double e3 = std::abs(g - 2.0 * r);
  o.detail << "segment err " << e1 << " in " << seg_time << " s, square err " << e2 << ", 64-gon err " << e3;
  o.require(e1 <= 1e-3, "unit segment");
  o.require(seg_time < 1.0, "unit segment time");
  o.require(e2 <= 2e-3, "unit square");
  o.require(e3 <= 5e-3, "64-gon");
}

void exact_vs_mc(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 50);
  double worst_z = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    SegmentUnion e;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) e.segments.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}});
    const double exact = favard_length(e, 4096);
    const auto mc = favard_mc(e, 1000000, 1000 + trial);
    const double z = std::abs(exact - mc.estimate) / mc.stderr_;
    worst_z = std::max(worst_z, z);
    o.require(z <= 3.0, "trial " + std::to_string(trial));
  }
  const double secs = seconds_since(t0);
  o.detail << "worst |exact - mc| / stderr = " << worst_z << " over 10 unions, " << secs << " s";
  o.require(secs < 30.0, "time");
}

void cone_lemmas(Outcome& o) {
  const auto t0 = Clock::now();
  for (const auto& t : run_lemma_suite(20240601, 10000, 4)) {
    o.detail << t.name << ": " << t.violations << "/" << t.samples << " worst " << t.worst << "; ";
    o.require(t.violations == 0 && t.configurations == 10000, t.name);
  }
  const double secs = seconds_since(t0);
  o.detail << secs << " s";
  o.require(secs < 10.0, "time");
}

double grid_maximal(const PiecewiseConstDensity& nu, double t) {
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

void maximal_function(Outcome& o) {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> pos(0, 100);
  std::uniform_int_distribution<int> cnt(2, 8);
  std::uniform_real_distribution<double> val(0.0, 3.0);
  int densities = 0;
  double worst = 0.0;
  while (densities < 100) {
    std::set<int> b;
    const int n = cnt(rng);
    while (static_cast<int>(b.size()) < n) b.insert(pos(rng));
    PiecewiseConstDensity nu;
    for (int k : b) nu.breaks.push_back(k / 100.0);
    for (std::size_t i = 0; i + 1 < nu.breaks.size(); ++i) nu.values.push_back(val(rng));
    if (nu.is_zero()) continue;
    ++densities;
    for (int probe = 0; probe < 3; ++probe) {
      const double t = pos(rng) / 100.0;
      worst = std::max(worst, std::abs(maximal_value(nu, t) - grid_maximal(nu, t)));
    }
  }
  o.detail << "largest deviation " << worst << " over " << densities << " densities";
  o.require(worst <= 1e-9, "deviation");
}

DiscreteMeasure random_measure(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  DiscreteMeasure mu;
  for (int i = 0; i < n; ++i) mu.push({u(rng), u(rng)}, w(rng));
  return mu;
}

void energy_additivity(Outcome& o) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int exact = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = random_measure(rng, 60);
    const Point x{0.2 * u(rng), 0.2 * u(rng)};
    const double c = u(rng);
    const DirectionSet g1{AngleInterval{c, 0.05}};
    const DirectionSet g2{AngleInterval{c + 0.15, 0.04}};
    const DirectionSet both{g1[0], g2[0]};
    const auto a = conical_energy(mu, x, g1, 0.5, 0, 8).total_exact();
    const auto b = conical_energy(mu, x, g2, 0.5, 0, 8).total_exact();
    const auto ab = conical_energy(mu, x, both, 0.5, 0, 8).total_exact();
    exact += a + b == ab ? 1 : 0;

    const int l = 0;
    const int j = 6;
    const auto prof = conical_energy(mu, x, g1, 0.5, l, j);
    FixedSum inner;
    for (int k = l + 1; k <= j - 1; ++k) inner += prof.masses[static_cast<std::size_t>(k - l)];
    const double integral = energy_integral(mu, x, g1, 0.5, l, j);
    if (integral > 0.0) worst = std::max(worst, inner.value() / integral);
    if (prof.total() > 0.0) worst = std::max(worst, integral / prof.total());
    o.require(inner.value() == 0.0 || integral > 0.0, "comparison with a vanishing integral");
  }
  o.detail << exact << "/100 exact additions, C(1/2) = " << worst;
  o.require(exact == 100, "additivity");
  o.require(worst <= 64.0, "C(rho)");
}

void lattice_invariants(Outcome& o) {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int passed = 0;
  std::set<int> levels;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 300; ++i) pts.push_back({u(rng), u(rng)});
    const int level = std::array<int, 3>{1, 2, 3}[trial % 3];
    levels.insert(level);
    const TriadicInterval J{level, static_cast<std::int64_t>(u(rng) * std::pow(3.0, level))};
    const int k = trial % 3;
    const int l = (trial / 3) % 3;
    const double rho = trial % 2 == 0 ? 0.5 : 0.125;
    const int m_lo = side_level(J.length(), k, rho);
    const int m_hi = side_level(J.length(), k + l, rho);
    const auto lat = rho == 0.5 ? BaseLattice::grid(pts, J.as_interval(), rho, m_lo, m_hi)
                                : BaseLattice::net(pts, rho, m_lo, m_hi);
    std::vector<std::size_t> all(pts.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto top = descend(lat, all, J, k, 0);
    const auto& p = top[static_cast<std::size_t>(u(rng) * static_cast<double>(top.size()))].atoms;
    const auto cubes = descend(lat, p, J, k, l);
    passed += check_descend(lat, p, cubes, J, k + l).ok() ? 1 : 0;
  }
  o.detail << passed << "/100 instances, H(J) in {1/3, 1/9, 1/27}";
  o.require(passed == 100, "descend checks");
  o.require(levels.count(1) && levels.count(3), "interval lengths");
}

void whitney_invariants(Outcome& o) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> ends(-256, 256);
  int passed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<double, double>> raw;
    for (int i = 0; i < 4; ++i) {
      const double a = ends(rng) / 64.0;
      const double b = ends(rng) / 64.0;
      raw.emplace_back(std::min(a, b), std::max(a, b));
    }
    if (trial % 10 == 0) raw.emplace_back(3.5, kInf);
    passed += check_whitney(whitney(OpenSet::from_intervals(raw), 1.0 / 512, 8.0)).ok() ? 1 : 0;
  }
  const auto unit = whitney(OpenSet::from_intervals({{0.0, 1.0}}), 1.0 / 1024, 4.0);
  const bool has = std::find(unit.intervals.begin(), unit.intervals.end(), DyadicInterval{3, 2}) != unit.intervals.end();
  o.detail << passed << "/100 random open sets, (0,1) holds [1/4, 3/8): " << (has ? "yes" : "no");
  o.require(passed == 100, "random open sets");
  o.require(check_whitney(unit).ok() && has, "unit fixture");
}

void tree_properties(Outcome& o) {
  auto run = [&](const std::string& name, const TreeInput& in) {
    const auto t0 = Clock::now();
    const auto t = build_tree(in);
    const auto rep = check_tree(t);
    const double secs = seconds_since(t0);
    o.detail << name << ": nodes " << rep.tree_nodes << ", roots sum " << rep.packing.roots_sum << " <= "
             << rep.packing.bound << ", " << secs << " s; ";
    for (const auto& c : rep.checks) o.require(c.ok, name + " " + c.name);
    o.require(rep.packing.roots_ok, name + " roots packing");
    o.require(secs < 60.0, name + " time");
  };
  run("single line", uniform_input(line(128), kVertical));
  run("two directions", two_direction_input());
  const auto t0 = Clock::now();
  auto [mu, st] = four_corners_stages();
  auto in = tree_input(mu, st, 0.125, 5);
  o.detail << "(stages " << seconds_since(t0) << " s) ";
  run("four corners", in);
}

void gap_intervals(Outcome& o) {
  const GapParams p;
  constexpr double kLow = 0.1;
  constexpr double kHigh = 10.0;
  for (std::uint64_t base : {0, 50}) {
    double lo = kInf;
    double hi = 0.0;
    int ok = 0;
    for (std::uint64_t s = base + 1; s <= base + 50; ++s) {
      GapFixtureOptions opt;
      opt.seed = s;
      opt.chain = static_cast<int>(s % 5);
      const auto res = find_gap_interval(gap_fixture(p, opt), p);
      ok += res.disjoint && res.ok() ? 1 : 0;
      lo = std::min(lo, res.length_ratio);
      hi = std::max(hi, res.length_ratio);
    }
    o.detail << "seeds " << base + 1 << "-" << base + 50 << ": " << ok << "/50 disjoint, H(I)/(lambda H(J) r) in [" << lo
             << ", " << hi << "]; ";
    o.require(ok == 50, "disjointness");
    o.require(lo >= kLow && hi <= kHigh, "envelope");
  }
  o.detail << "c1 = " << kLow << ", c2 = " << kHigh;
}

void extraction(Outcome& o) {
  const AngleInterval cone{0.25, 1.0 / 64};
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int graphs = 0;
  for (int trial = 0; trial < 20; ++trial) {
    DiscreteMeasure mu;
    for (int i = 0; i < 60; ++i) mu.push({u(rng), 0.3 * u(rng)}, 1.0 / 60);
    std::vector<std::size_t> ids(mu.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    const auto counts = bad_counts(mu, ids, cone);
    const int m0 = *std::max_element(counts.begin(), counts.end());
    const auto res = extract_graph(mu, ids, cone, m0);
    std::vector<Point> pts;
    for (std::size_t a : res.certificate.atoms) pts.push_back(mu.points[a]);
    const AngleInterval narrow{cone.center, std::ldexp(cone.half_width, -m0)};
    graphs += verify_lipschitz(pts, narrow).is_graph && !pts.empty() ? 1 : 0;
  }
  o.require(graphs == 20, "random extractions");

  DiscreteMeasure v;
  for (int i = 0; i < 64; ++i) {
    const double t = -0.5 + (i + 0.5) / 64;
    v.push({t, std::abs(t)}, 1.0 / 64);
  }
  std::vector<std::size_t> vid(v.size());
  std::iota(vid.begin(), vid.end(), std::size_t{0});
  const double lip = extract_graph(v, vid, cone, 3).certificate.lip;
  o.require(std::abs(lip - 1.0) <= 1e-9, "|t| graph");

  ExperimentConfig cfg;
  const auto t0 = Clock::now();
  const auto run = cli::run_pipeline(cfg, fixture("four_corners_2.json"), 0.2);
  const auto& rep = run.report;
  const std::size_t pts = rep.at("certificate").at("points").size();
  o.detail << graphs << "/20 random extractions pass the cone test, |t| lip - 1 = " << lip - 1.0
           << ", pipeline on four_corners(2): " << pts << " certificate points, mass fraction "
           << rep.at("extraction").at("mass_fraction").get<double>() << ", " << seconds_since(t0) << " s";
  o.require(pts > 0, "pipeline certificate");
  o.require(run.invariants_ok(), "pipeline stage invariants");
}

void cantor_regression(Outcome& o) {
  std::ifstream f(fixture("cantor_golden.json"));
  if (!f) {
    o.require(false, "missing golden fixture");
    return;
  }
  const auto golden = nlohmann::json::parse(f);
  const int n_angles = golden.at("n_angles").get<int>();
  const auto& want = golden.at("values");
  double worst = 0.0;
  std::vector<double> got;
  for (int n = 0; n <= 5; ++n) {
    got.push_back(favard_length(skeleton(four_corners(n)), n_angles));
    worst = std::max(worst, std::abs(got.back() - want.at(static_cast<std::size_t>(n)).get<double>()));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < got.size(); ++i) decreasing = decreasing && got[i] < got[i - 1];
  o.detail << "Fav(K_0..K_5) = ";
  for (double g : got) o.detail << g << " ";
  o.detail << "largest deviation from golden " << worst;
  o.require(decreasing, "strictly decreasing");
  o.require(worst <= 1e-9, "golden values");
}

struct Criterion {
  const char* title;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"Favard closed forms", favard_closed_forms},
      {"exact quadrature against Buffon needles", exact_vs_mc},
      {"cone and metric inclusions", cone_lemmas},
      {"exact maximal function", maximal_function},
      {"energy additivity and dyadic comparison", energy_additivity},
      {"anisotropic lattice invariants", lattice_invariants},
      {"Whitney decompositions", whitney_invariants},
      {"direction tree properties", tree_properties},
      {"gap intervals", gap_intervals},
      {"Lipschitz graph extraction", extraction},
      {"Cantor regression", cantor_regression},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::printf("criterion %d: FAIL unknown criterion\n", id);
      ++failures;
      continue;
    }
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[static_cast<std::size_t>(id - 1)].run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s %s (%.2f s) -- %s\n", id, o.pass ? "PASS" : "FAIL",
                criteria[static_cast<std::size_t>(id - 1)].title, seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
