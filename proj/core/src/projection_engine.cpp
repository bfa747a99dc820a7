// SPDX-License-Identifier: MIT
#include "favard/projection_engine.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "favard/errors.hpp"
#include "favard/parallel.hpp"

namespace favard {

double IntervalUnion1D::measure() const {
  std::vector<double> l;
  l.reserve(parts.size());
  for (auto [a, b] : parts) l.push_back(b - a);
  return pairwise_sum(l.data(), l.size());
}

bool IntervalUnion1D::contains(double t) const {
  auto it = std::upper_bound(parts.begin(), parts.end(), t,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  if (it == parts.begin()) return false;
  --it;
  return t <= it->second;
}

IntervalUnion1D IntervalUnion1D::from_intervals(std::vector<std::pair<double, double>> raw) {
  std::sort(raw.begin(), raw.end());
  IntervalUnion1D out;
  for (auto [a, b] : raw) {
    if (!out.parts.empty() && a <= out.parts.back().second) {
      out.parts.back().second = std::max(out.parts.back().second, b);
    } else {
      out.parts.emplace_back(a, b);
    }
  }
  return out;
}

double PiecewiseConstDensity::total_mass() const {
  std::vector<double> m;
  for (std::size_t i = 0; i < values.size(); ++i) m.push_back(values[i] * (breaks[i + 1] - breaks[i]));
  for (auto [t, w] : atoms) m.push_back(w);
  return pairwise_sum(m.data(), m.size());
}

bool PiecewiseConstDensity::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(atoms.begin(), atoms.end(), [](const auto& a) { return a.second == 0.0; });
}

IntervalUnion1D project_segments(const SegmentUnion& e, double theta) {
  const Point u = direction_vector(theta);
  std::vector<std::pair<double, double>> raw;
  raw.reserve(e.size());
  for (const auto& s : e.segments) {
    const double pa = dot(s.a, u);
    const double pb = dot(s.b, u);
    raw.emplace_back(std::min(pa, pb), std::max(pa, pb));
  }
  return IntervalUnion1D::from_intervals(std::move(raw));
}

std::vector<std::pair<double, double>> projection_profile(const SegmentUnion& e, int n_angles,
                                                          int workers) {
  if (n_angles < 2) throw PreconditionError("favard: n_angles must be at least 2");
  std::vector<std::pair<double, double>> rows(static_cast<std::size_t>(n_angles));
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    const double theta = (static_cast<double>(i) + 0.5) / static_cast<double>(n_angles);
    rows[i] = {theta, project_segments(e, theta).measure()};
  });
  return rows;
}

double favard_length(const SegmentUnion& e, int n_angles, int workers) {
  const auto rows = projection_profile(e, n_angles, workers);
  std::vector<double> m;
  m.reserve(rows.size());
  for (const auto& r : rows) m.push_back(r.second);
  return pairwise_sum(m.data(), m.size()) / static_cast<double>(n_angles);
}

McEstimate favard_mc(const SegmentUnion& e, std::uint64_t needle_count, std::uint64_t seed,
                     int workers) {
  if (needle_count < 100) throw PreconditionError("favard_mc: needle_count must be at least 100");
  McEstimate out;
  out.needles = needle_count;
  if (e.empty()) return out;
  const Box box = e.bbox();
  const Point c = box.center();
  const double radius = 0.5 * box.diagonal();
  constexpr std::uint64_t kBlocks = 64;
  std::vector<std::uint64_t> hits(kBlocks, 0);
  parallel_for(kBlocks, workers, [&](std::size_t blk) {
    const std::uint64_t b = needle_count * blk / kBlocks;
    const std::uint64_t end = needle_count * (blk + 1) / kBlocks;
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(blk)};
    std::mt19937_64 rng(ss);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uint64_t h = 0;
    for (std::uint64_t k = b; k < end; ++k) {
      const double theta = unif(rng);
      const Point u = direction_vector(theta);
      const double t = dot(c, u) + radius * (2.0 * unif(rng) - 1.0);
      for (const auto& s : e.segments) {
        if ((dot(s.a, u) - t) * (dot(s.b, u) - t) <= 0.0) {
          ++h;
          break;
        }
      }
    }
    hits[blk] = h;
  });
  for (auto h : hits) out.hits += h;
  const double n = static_cast<double>(needle_count);
  const double p = static_cast<double>(out.hits) / n;
  out.estimate = 2.0 * radius * p;
  out.stderr_ = 2.0 * radius * std::sqrt(p * (1.0 - p) / n);
  return out;
}

PiecewiseConstDensity pushforward_density(const SegmentUnion& e, double theta, double perp_cutoff) {
  if (perp_cutoff < 0.0) throw PreconditionError("pushforward_density: cutoff must be nonnegative");
  const Point u = direction_vector(theta);
  PiecewiseConstDensity nu;
  std::map<double, std::pair<double, int>> delta;
  std::map<double, double> atoms;
  for (const auto& s : e.segments) {
    const double len = s.length();
    const double c = std::fabs(std::cos(kTwoPi * (theta - s.direction())));
    const double pa = dot(s.a, u);
    const double pb = dot(s.b, u);
    const double lo = std::min(pa, pb);
    const double hi = std::max(pa, pb);
    if (c < perp_cutoff || !(hi > lo)) {
      atoms[dot(s.midpoint(), u)] += len;
      continue;
    }
    const double v = len / (hi - lo);
    delta[lo].first += v;
    delta[lo].second += 1;
    delta[hi].first -= v;
    delta[hi].second -= 1;
  }
  double run = 0.0;
  int active = 0;
  for (auto it = delta.begin(); it != delta.end(); ++it) {
    nu.breaks.push_back(it->first);
    run += it->second.first;
    active += it->second.second;
    if (active == 0) run = 0.0;
    if (std::next(it) != delta.end()) nu.values.push_back(std::max(0.0, run));
  }
  for (auto [t, w] : atoms) nu.atoms.emplace_back(t, w);
  return nu;
}

double density_value(const PiecewiseConstDensity& nu, double t) {
  for (auto [a, w] : nu.atoms) {
    if (a == t && w > 0.0) return kInf;
  }
  const auto& b = nu.breaks;
  if (b.size() < 2 || t < b.front() || t > b.back()) return 0.0;
  const auto hi = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), t) - b.begin());
  const auto lo = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), t) - b.begin());
  const double right = hi < b.size() ? nu.values[hi - 1] : 0.0;
  const double left = lo > 0 ? nu.values[lo - 1] : 0.0;
  return 0.5 * (left + right);
}

MaximalEvaluator::MaximalEvaluator(const PiecewiseConstDensity& nu) : nu_(nu) {
  cdf_.assign(nu.breaks.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nu.breaks.size(); ++i) {
    cdf_[i + 1] = cdf_[i] + nu.values[i] * (nu.breaks[i + 1] - nu.breaks[i]);
  }
}

double MaximalEvaluator::continuous_cdf(double s) const {
  const auto& b = nu_.breaks;
  if (b.empty() || s <= b.front()) return 0.0;
  if (s >= b.back()) return cdf_.back();
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), s) - b.begin()) - 1;
  return cdf_[i] + nu_.values[i] * (s - b[i]);
}

double MaximalEvaluator::density_left(double t) const {
  const auto& b = nu_.breaks;
  if (b.empty() || t <= b.front() || t > b.back()) return 0.0;
  const std::size_t i = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), t) - b.begin()) - 1;
  return nu_.values[i];
}

double MaximalEvaluator::density_right(double t) const {
  const auto& b = nu_.breaks;
  if (b.empty() || t < b.front() || t >= b.back()) return 0.0;
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), t) - b.begin()) - 1;
  return nu_.values[i];
}

double MaximalEvaluator::operator()(double t) const {
  std::vector<std::pair<double, double>> atom_d;
  atom_d.reserve(nu_.atoms.size());
  for (auto [a, w] : nu_.atoms) {
    if (w <= 0.0) continue;
    if (a == t) return kInf;
    atom_d.emplace_back(std::fabs(a - t), w);
  }
  std::sort(atom_d.begin(), atom_d.end());
  std::vector<double> atom_prefix(atom_d.size() + 1, 0.0);
  for (std::size_t i = 0; i < atom_d.size(); ++i) atom_prefix[i + 1] = atom_prefix[i] + atom_d[i].second;

  double best = 0.5 * (density_left(t) + density_right(t));
  std::vector<double> radii;
  radii.reserve(nu_.breaks.size() + atom_d.size());
  for (double b : nu_.breaks) {
    if (b != t) radii.push_back(std::fabs(b - t));
  }
  for (auto [d, w] : atom_d) radii.push_back(d);
  for (double r : radii) {
    const double cont = continuous_cdf(t + r) - continuous_cdf(t - r);
    const auto k = static_cast<std::size_t>(
        std::upper_bound(atom_d.begin(), atom_d.end(), std::make_pair(r, kInf)) - atom_d.begin());
    best = std::max(best, (cont + atom_prefix[k]) / (2.0 * r));
  }
  return best;
}

double maximal_value(const PiecewiseConstDensity& nu, double t) {
  if (nu.is_zero()) throw PreconditionError("maximal_value: the measure is zero");
  return MaximalEvaluator(nu)(t);
}

double mu_theta(const SegmentUnion& e, double theta, Point x, double perp_cutoff) {
  return maximal_value(pushforward_density(e, theta, perp_cutoff), project(theta, x));
}

double mu_theta_perp(const SegmentUnion& e, double theta, Point x, double perp_cutoff) {
  return mu_theta(e, theta + 0.25, x, perp_cutoff);
}

}  // namespace favard
