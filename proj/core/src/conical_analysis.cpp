// SPDX-License-Identifier: MIT
#include "favard/conical_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "favard/errors.hpp"
#include "favard/parallel.hpp"

namespace favard {

namespace {

bool in_directions(const DirectionSet& g, Point d) {
  return std::any_of(g.begin(), g.end(), [&](const AngleInterval& I) { return direction_in(I, d); });
}

// Distances and weights of the atoms whose direction from x lies in g, sorted
// by distance; atoms at x are skipped.
std::vector<std::pair<double, double>> cone_distances(const DiscreteMeasure& mu, Point x,
                                                      const DirectionSet& g) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Point d = mu.points[i] - x;
    const double r = norm(d);
    if (r == 0.0 || !in_directions(g, d)) continue;
    out.emplace_back(r, mu.weights[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("rho must lie in (0, 1)");
}

}  // namespace

DirectionSet merge_arcs(const std::vector<TriadicInterval>& family) {
  std::vector<TriadicInterval> f = family;
  std::sort(f.begin(), f.end());
  std::vector<std::pair<double, double>> arcs;
  for (const auto& I : f) {
    if (!arcs.empty() && I.lo() <= arcs.back().second + kGeomTol) {
      arcs.back().second = std::max(arcs.back().second, I.hi());
    } else {
      arcs.emplace_back(I.lo(), I.hi());
    }
  }
  DirectionSet out;
  out.reserve(arcs.size());
  for (auto [a, b] : arcs) out.push_back(AngleInterval::from_bounds(a, b));
  return out;
}

DirectionSet perp(const DirectionSet& g) {
  DirectionSet out;
  out.reserve(g.size());
  for (const auto& I : g) out.push_back(I.perp());
  return out;
}

FixedSum cone_mass_exact(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double r,
                         double big_r) {
  if (r < 0.0 || !(big_r > r)) throw PreconditionError("cone_mass: radii must satisfy 0 <= r < R");
  FixedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (cone_contains(x, g, r, big_r, mu.points[i])) s.add(mu.weights[i]);
  }
  return s;
}

double cone_mass(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double r, double big_r) {
  return cone_mass_exact(mu, x, g, r, big_r).value();
}

int scale_index(double d, double rho) {
  check_rho(rho);
  if (!(d > 0.0) || !std::isfinite(d)) throw PreconditionError("scale_index: distance must be positive");
  int k = static_cast<int>(std::floor(std::log(d) / std::log(rho)));
  while (!in_annulus(d, 0.0, std::pow(rho, k))) --k;
  while (!in_annulus(d, std::pow(rho, k + 1), std::pow(rho, k))) ++k;
  return k;
}

double EnergyProfile::m(int k) const {
  if (k < l || k > j) return 0.0;
  return masses[static_cast<std::size_t>(k - l)].value();
}

FixedSum EnergyProfile::total_exact() const {
  FixedSum s;
  for (const auto& v : masses) s += v;
  return s;
}

EnergyProfile conical_energy(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double rho,
                             int l, int j) {
  check_rho(rho);
  if (l > j) throw PreconditionError("conical_energy: l must not exceed j");
  EnergyProfile p;
  p.rho = rho;
  p.l = l;
  p.j = j;
  p.masses.assign(static_cast<std::size_t>(j - l + 1), FixedSum{});
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Point d = mu.points[i] - x;
    const double r = norm(d);
    if (r == 0.0 || !in_directions(g, d)) continue;
    const int k = scale_index(r, rho);
    if (k < l || k > j) continue;
    p.masses[static_cast<std::size_t>(k - l)].add(mu.weights[i] / std::pow(rho, k));
  }
  return p;
}

FixedSum energy_from(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double rho, int l) {
  check_rho(rho);
  FixedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Point d = mu.points[i] - x;
    const double r = norm(d);
    if (r == 0.0 || !in_directions(g, d)) continue;
    const int k = scale_index(r, rho);
    if (k >= l) s.add(mu.weights[i] / std::pow(rho, k));
  }
  return s;
}

double energy_integral(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double rho, int l,
                       int j) {
  check_rho(rho);
  if (l > j) throw PreconditionError("energy_integral: l must not exceed j");
  const double lo = std::pow(rho, j);
  const double hi = std::pow(rho, l);
  std::vector<double> terms;
  for (auto [d, w] : cone_distances(mu, x, g)) {
    const double a = std::max(d, lo);
    const double b = std::min(d / rho, hi);
    if (b > a) terms.push_back(w * (1.0 / a - 1.0 / b));
  }
  return pairwise_sum(terms.data(), terms.size());
}

double energy_integral_numeric(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double rho,
                               int l, int j, int n) {
  check_rho(rho);
  if (l > j || n < 1) throw PreconditionError("energy_integral_numeric: bad range or node count");
  const auto cd = cone_distances(mu, x, g);
  std::vector<double> dist(cd.size());
  std::vector<double> prefix(cd.size() + 1, 0.0);
  for (std::size_t i = 0; i < cd.size(); ++i) {
    dist[i] = cd[i].first;
    prefix[i + 1] = prefix[i] + cd[i].second;
  }
  auto mass_upto = [&](double r) {
    return prefix[static_cast<std::size_t>(std::upper_bound(dist.begin(), dist.end(), r) - dist.begin())];
  };
  const double s0 = j * std::log(rho);
  const double s1 = l * std::log(rho);
  const double h = (s1 - s0) / n;
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = std::exp(s0 + (i + 0.5) * h);
    vals[static_cast<std::size_t>(i)] = (mass_upto(r) - mass_upto(rho * r)) / r;
  }
  return h * pairwise_sum(vals.data(), vals.size());
}

double cone_energy(const DiscreteMeasure& mu, Point x, const DirectionSet& g) {
  std::vector<double> terms;
  for (auto [d, w] : cone_distances(mu, x, g)) terms.push_back(w / d);
  return pairwise_sum(terms.data(), terms.size());
}

double cone_energy(const DiscreteMeasure& mu, Point x, const DirectionSet& g, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("cone_energy: radius must be positive");
  std::vector<double> terms;
  for (auto [d, w] : cone_distances(mu, x, g)) {
    if (d > radius) break;
    terms.push_back(w * (1.0 / d - 1.0 / radius));
  }
  return pairwise_sum(terms.data(), terms.size());
}

bool BadScaleSet::contains(int k) const { return std::binary_search(scales.begin(), scales.end(), k); }

BadScaleSet bad_scales(const std::vector<Point>& pts, Point x, const AngleInterval& j_interval,
                       double rho, int l, int j) {
  check_rho(rho);
  if (l > j) throw PreconditionError("bad_scales: l must not exceed j");
  BadScaleSet out;
  out.j_interval = j_interval;
  out.x = x;
  for (const Point& y : pts) {
    const Point d = y - x;
    const double r = norm(d);
    if (r == 0.0 || !direction_in(j_interval, d)) continue;
    const int k = scale_index(r, rho);
    if (k >= l && k <= j) out.scales.push_back(k);
  }
  std::sort(out.scales.begin(), out.scales.end());
  out.scales.erase(std::unique(out.scales.begin(), out.scales.end()), out.scales.end());
  return out;
}

BadScaleSet bad_scales(const DiscreteMeasure& mu, const std::vector<std::size_t>& subset, Point x,
                       const AngleInterval& j_interval, double rho, int l, int j) {
  std::vector<Point> pts;
  pts.reserve(subset.size());
  for (auto i : subset) pts.push_back(mu.points.at(i));
  BadScaleSet out = bad_scales(pts, x, j_interval, rho, l, j);
  out.restricted = true;
  return out;
}

BoundedProjectionSet select_bounded_projection_set(const SegmentUnion& e, const DiscreteMeasure& mu,
                                                   double theta, double m, double weak_constant) {
  if (!(m > 0.0)) throw PreconditionError("select_bounded_projection_set: M must be positive");
  BoundedProjectionSet out;
  out.projection_measure = project_segments(e, theta).measure();
  out.total_mass = e.total_length();
  if (!(out.projection_measure > kGeomTol * out.total_mass)) {
    throw PreconditionError("select_bounded_projection_set: the projection has measure zero");
  }
  out.threshold = weak_constant * out.total_mass / out.projection_measure;
  const PiecewiseConstDensity nu = pushforward_density(e, theta);
  const MaximalEvaluator eval(nu);
  std::vector<double> w;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (eval(project(theta, mu.points[i])) <= m) {
      out.ids.push_back(i);
      w.push_back(mu.weights[i]);
    }
  }
  out.mass = pairwise_sum(w.data(), w.size());
  out.lemma_applies = m >= out.threshold;
  out.lemma_holds = out.mass >= 0.5 * out.projection_measure;
  return out;
}

void GoodDirectionFamily::validate() const {
  if (intervals.size() != atoms.size() || witnesses.size() != atoms.size()) {
    throw InvariantError("GoodDirectionFamily: ragged per-point arrays");
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& f = intervals[i];
    if (witnesses[i].size() != f.size()) throw InvariantError("GoodDirectionFamily: missing witness");
    for (std::size_t a = 0; a < f.size(); ++a) {
      if (!j0.contains(f[a])) throw InvariantError("GoodDirectionFamily: interval outside J0");
      if (!f[a].contains(witnesses[i][a])) throw InvariantError("GoodDirectionFamily: witness outside its interval");
      for (std::size_t b = a + 1; b < f.size(); ++b) {
        if (!f[a].disjoint(f[b])) throw InvariantError("GoodDirectionFamily: overlapping intervals");
      }
    }
  }
}

GoodDirectionSelection select_good_directions(const SegmentUnion& e, const DiscreteMeasure& mu,
                                              const TriadicInterval& j0, const DirectionSet& g,
                                              const GoodDirectionParams& params) {
  if (!(params.kappa > 0.0)) throw PreconditionError("select_good_directions: kappa must be positive");
  if (params.depth < j0.level || params.depth > 20) {
    throw PreconditionError("select_good_directions: depth must lie between the level of J0 and 20");
  }
  if (mu.empty()) throw PreconditionError("select_good_directions: no atoms");
  GoodDirectionSelection out;
  out.mu = mu;
  out.m = params.m_constant / params.kappa;
  const int shift = params.depth - j0.level;
  std::int64_t span = 1;
  for (int i = 0; i < shift; ++i) span *= 3;
  for (std::int64_t k = j0.index * span; k < (j0.index + 1) * span; ++k) {
    const TriadicInterval c{params.depth, k};
    const double t = c.center();
    if (std::any_of(g.begin(), g.end(), [&](const AngleInterval& I) { return I.contains(t); })) {
      out.cells.push_back(c);
    }
  }
  if (out.cells.empty()) throw PreconditionError("select_good_directions: G contains no sampled direction");
  const double cell_len = out.cells.front().length();
  out.measured_g = cell_len * static_cast<double>(out.cells.size());

  const double total = e.total_length();
  const std::size_t nc = out.cells.size();
  std::vector<double> proj(nc);
  parallel_for(nc, params.workers, [&](std::size_t c) {
    proj[c] = project_segments(e, out.cells[c].center()).measure();
  });
  for (std::size_t c = 0; c < nc; ++c) {
    if (!(proj[c] > params.kappa * total)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "select_good_directions: big-projection hypothesis fails at theta=" << out.cells[c].center()
          << " (projection " << proj[c] << ", required above " << params.kappa * total << ")";
      throw PreconditionError(msg.str());
    }
  }

  std::vector<PiecewiseConstDensity> nus(nc);
  std::vector<std::vector<double>> values(nc);
  parallel_for(nc, params.workers, [&](std::size_t c) {
    const double theta = out.cells[c].center();
    nus[c] = pushforward_density(e, theta, params.perp_cutoff);
    const MaximalEvaluator eval(nus[c]);
    values[c].resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) values[c][i] = eval(project(theta, mu.points[i]));
  });

  out.family.j0 = j0;
  out.family.m = out.m;
  std::vector<double> kept_w;
  std::vector<double> all_w(mu.weights);
  std::vector<std::vector<std::size_t>> good_cells;
  out.min_cover_ratio = kInf;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::vector<std::size_t> good;
    for (std::size_t c = 0; c < nc; ++c) {
      if (values[c][i] <= out.m) good.push_back(c);
    }
    const double ratio = cell_len * static_cast<double>(good.size()) / out.measured_g;
    if (ratio < params.kappa / 4.0) continue;
    std::vector<TriadicInterval> cells;
    for (auto c : good) cells.push_back(out.cells[c]);
    std::vector<TriadicInterval> fam = coalesce(cells);
    std::vector<double> wit;
    for (const auto& I : fam) {
      for (auto c : good) {
        if (I.contains(out.cells[c])) {
          wit.push_back(out.cells[c].center());
          break;
        }
      }
    }
    out.family.atoms.push_back(i);
    out.family.intervals.push_back(std::move(fam));
    out.family.witnesses.push_back(std::move(wit));
    good_cells.push_back(std::move(good));
    kept_w.push_back(mu.weights[i]);
    out.min_cover_ratio = std::min(out.min_cover_ratio, ratio);
  }
  out.family.validate();
  const double mass_all = pairwise_sum(all_w.data(), all_w.size());
  out.mass_fraction = pairwise_sum(kept_w.data(), kept_w.size()) / mass_all;
  out.mass_ok = out.mass_fraction >= params.kappa / 4.0;
  if (out.family.atoms.empty()) out.min_cover_ratio = 0.0;
  out.cover_ok = !out.family.atoms.empty() && out.min_cover_ratio >= params.kappa / 5.0;

  const std::size_t ne = out.family.atoms.size();
  std::vector<double> econst(ne, 0.0);
  std::vector<double> dconst(ne, 0.0);
  std::vector<char> wit_ok(ne, 1);
  parallel_for(ne, params.workers, [&](std::size_t a) {
    const std::size_t i = out.family.atoms[a];
    const Point x = mu.points[i];
    for (double th : out.family.witnesses[a]) {
      const auto c = static_cast<std::size_t>(std::lower_bound(out.cells.begin(), out.cells.end(),
                                                               TriadicInterval::containing(th, params.depth)) -
                                              out.cells.begin());
      if (c >= nc || !(values[c][i] <= out.m)) wit_ok[a] = 0;
    }
    const double energy = cone_energy(mu, x, perp(merge_arcs(out.family.intervals[a])));
    econst[a] = energy / (out.m * out.measured_g);
    std::vector<double> dens;
    for (auto c : good_cells[a]) dens.push_back(cell_len * density_value(nus[c], project(out.cells[c].center(), x)));
    const double integral = pairwise_sum(dens.data(), dens.size());
    dconst[a] = energy == 0.0 ? 0.0 : (integral > 0.0 ? energy / integral : kInf);
  });
  for (std::size_t a = 0; a < ne; ++a) {
    out.energy_constant = std::max(out.energy_constant, econst[a]);
    out.density_constant = std::max(out.density_constant, dconst[a]);
  }
  out.witness_ok = std::all_of(wit_ok.begin(), wit_ok.end(), [](char c) { return c != 0; });
  return out;
}

}  // namespace favard
