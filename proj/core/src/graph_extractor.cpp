// SPDX-License-Identifier: MIT
#include "favard/graph_extractor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "favard/errors.hpp"
#include "favard/exact_sum.hpp"
#include "favard/parallel.hpp"

namespace favard {

namespace {

struct Incidence {
  std::size_t other = 0;
  int scale = 0;
};

// For every position a of k, the positions b != a with k[b] in X(k[a], J) and
// their scales.
std::vector<std::vector<Incidence>> cone_incidences(const DiscreteMeasure& mu, const std::vector<std::size_t>& k,
                                                    const AngleInterval& j, int workers) {
  std::vector<std::vector<Incidence>> out(k.size());
  parallel_for(k.size(), workers, [&](std::size_t a) {
    const Point x = mu.points[k[a]];
    for (std::size_t b = 0; b < k.size(); ++b) {
      if (b == a) continue;
      const Point d = mu.points[k[b]] - x;
      const double r = norm(d);
      if (r == 0.0 || !direction_in(j, d)) continue;
      out[a].push_back({b, dyadic_scale(r)});
    }
  });
  return out;
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

AngleInterval scaled(const AngleInterval& j, double c) { return {j.center, c * j.half_width}; }

void require_bad_bound(const DiscreteMeasure& mu, const std::vector<std::size_t>& f, const AngleInterval& j, int m,
                       int workers) {
  const auto counts = bad_counts(mu, f, j, workers);
  std::ostringstream msg;
  std::size_t offending = 0;
  for (std::size_t a = 0; a < f.size(); ++a) {
    if (counts[a] <= m) continue;
    if (offending < 16) msg << (offending ? ", " : "") << f[a] << " (" << counts[a] << ")";
    ++offending;
  }
  if (offending > 0) {
    std::ostringstream full;
    full << offending << " atoms have more than " << m << " bad scales: " << msg.str() << (offending > 16 ? ", ..." : "");
    throw PreconditionError(full.str());
  }
}

}  // namespace

int dyadic_scale(double distance) {
  if (!(distance > 0.0) || !std::isfinite(distance)) throw PreconditionError("dyadic_scale: distance must be positive");
  int ex = 0;
  const double m = std::frexp(distance, &ex);
  return m == 0.5 ? 1 - ex : -ex;
}

std::vector<int> bad_counts(const DiscreteMeasure& mu, const std::vector<std::size_t>& k, const AngleInterval& j,
                            int workers) {
  const auto inc = cone_incidences(mu, k, j, workers);
  std::vector<int> out(k.size(), 0);
  for (std::size_t a = 0; a < k.size(); ++a) {
    std::vector<int> scales;
    for (const auto& i : inc[a]) scales.push_back(i.scale);
    std::sort(scales.begin(), scales.end());
    out[a] = static_cast<int>(std::unique(scales.begin(), scales.end()) - scales.begin());
  }
  return out;
}

ReduceResult reduce_bad_scales(const DiscreteMeasure& mu, const std::vector<std::size_t>& f_in, const AngleInterval& j,
                               int m, double ahlfors, int workers) {
  if (m < 1) throw PreconditionError("reduce_bad_scales: M must be at least 1");
  const auto f = sorted_unique(f_in);
  for (std::size_t a : f) {
    if (a >= mu.size()) throw PreconditionError("reduce_bad_scales: atom index out of range");
  }
  require_bad_bound(mu, f, j, m, workers);

  const auto inc = cone_incidences(mu, f, scaled(j, 0.5), workers);
  std::vector<std::vector<Incidence>> rev(f.size());
  std::vector<std::map<int, int>> cnt(f.size());
  for (std::size_t a = 0; a < f.size(); ++a) {
    for (const auto& i : inc[a]) {
      rev[i.other].push_back({a, i.scale});
      ++cnt[a][i.scale];
    }
  }
  std::vector<char> alive(f.size(), 1);
  auto bad_of = [&](std::size_t a) {
    int n = 0;
    for (const auto& [k, c] : cnt[a]) n += c > 0 ? 1 : 0;
    return n;
  };
  auto current_max = [&] {
    int best = 0;
    for (std::size_t a = 0; a < f.size(); ++a) {
      if (alive[a]) best = std::max(best, bad_of(a));
    }
    return best;
  };

  ReduceResult res;
  res.max_bad.push_back(current_max());
  std::vector<long> part(f.size());
  for (;;) {
    std::fill(part.begin(), part.end(), 0);
    bool any = false;
    for (std::size_t a = 0; a < f.size(); ++a) {
      if (!alive[a]) continue;
      const int b = bad_of(a);
      if (b <= m - 1) continue;
      any = true;
      part[a] += b;
      for (const auto& i : inc[a]) {
        if (alive[i.other]) ++part[i.other];
      }
    }
    if (!any) break;
    std::size_t pick = f.size();
    for (std::size_t a = 0; a < f.size(); ++a) {
      if (!alive[a] || part[a] == 0) continue;
      if (pick == f.size() || part[a] > part[pick]) {
        pick = a;
      } else if (part[a] == part[pick]) {
        const Point p = mu.points[f[a]];
        const Point q = mu.points[f[pick]];
        if (std::tie(p.x1, p.x2) < std::tie(q.x1, q.x2)) pick = a;
      }
    }
    alive[pick] = 0;
    res.removed.push_back(f[pick]);
    for (const auto& i : rev[pick]) --cnt[i.other][i.scale];
    const int now = current_max();
    if (now < res.max_bad.back()) res.max_bad.push_back(now);
  }

  FixedSum mass;
  FixedSum tau;
  for (std::size_t a = 0; a < f.size(); ++a) {
    tau.add(mu.weights[f[a]]);
    if (!alive[a]) continue;
    res.kept.push_back(f[a]);
    mass.add(mu.weights[f[a]]);
  }
  res.mass = mass.value();
  res.benchmark = j.length() * tau.value() * tau.value() / (ahlfors * ahlfors);
  res.benchmark_ratio = res.benchmark > 0.0 ? res.mass / res.benchmark : 0.0;
  return res;
}

LipschitzCheck verify_lipschitz(const std::vector<Point>& k, const AngleInterval& j_prime, int workers) {
  const double theta0 = wrap_angle(j_prime.center + 0.25);
  const std::size_t n = k.size();
  std::vector<std::size_t> viol(n, 0);
  std::vector<std::size_t> first(n, n);
  std::vector<double> lip(n, 0.0);
  parallel_for(n, workers, [&](std::size_t a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      const Point d = k[b] - k[a];
      const double t = std::abs(project(theta0, d));
      const double s = std::abs(project_perp(theta0, d));
      if (norm(d) == 0.0 || direction_in(j_prime, d)) {
        ++viol[a];
        if (first[a] == n) first[a] = b;
        continue;
      }
      lip[a] = std::max(lip[a], s / t);
    }
  });
  LipschitzCheck out;
  for (std::size_t a = 0; a < n; ++a) {
    if (viol[a] > 0 && out.violations == 0) out.witness = {a, first[a]};
    out.violations += viol[a];
    out.lip = std::max(out.lip, lip[a]);
  }
  out.is_graph = out.violations == 0;
  if (!out.is_graph) out.lip = kInf;
  return out;
}

double GraphCertificate::operator()(double t) const {
  if (points.empty()) throw PreconditionError("GraphCertificate: no points");
  if (t <= points.front().first) return points.front().second;
  if (t >= points.back().first) return points.back().second;
  auto it = std::lower_bound(points.begin(), points.end(), std::make_pair(t, -kInf));
  const auto& [t1, f1] = *it;
  const auto& [t0, f0] = *(it - 1);
  if (t1 == t) return f1;
  return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
}

Point GraphCertificate::embed(double t) const {
  const Point e = direction_vector(theta0);
  const Point n = direction_vector(theta0 + 0.25);
  const double f = (*this)(t);
  return {t * e.x1 + f * n.x1, t * e.x2 + f * n.x2};
}

ExtractResult extract_graph(const DiscreteMeasure& mu, const std::vector<std::size_t>& f_in, const AngleInterval& j,
                            int m0, double c_j, int workers) {
  if (m0 < 0) throw PreconditionError("extract_graph: M_0 must be nonnegative");
  if (!(j.length() <= c_j)) {
    std::ostringstream msg;
    msg << "extract_graph: H(J) = " << j.length() << " exceeds c_J = " << c_j;
    throw PreconditionError(msg.str());
  }
  auto k = sorted_unique(f_in);
  for (std::size_t a : k) {
    if (a >= mu.size()) throw PreconditionError("extract_graph: atom index out of range");
  }
  require_bad_bound(mu, k, j, m0, workers);
  const AngleInterval final_cone = scaled(j, std::ldexp(1.0, -m0));
  auto clean = [&](const std::vector<std::size_t>& set) {
    const auto c = bad_counts(mu, set, final_cone, workers);
    return std::all_of(c.begin(), c.end(), [](int v) { return v == 0; });
  };
  ExtractResult res;
  for (int i = 1; i <= m0 && !clean(k); ++i) {
    k = reduce_bad_scales(mu, k, scaled(j, std::ldexp(1.0, 1 - i)), m0 - i + 1, 1.0, workers).kept;
    res.stages.push_back(k);
  }
  if (!clean(k)) throw InvariantError("extract_graph: bad scales remain after the halvings");

  std::vector<Point> pts;
  for (std::size_t a : k) pts.push_back(mu.points[a]);
  res.check = verify_lipschitz(pts, final_cone, workers);
  if (!res.check.is_graph) throw InvariantError("extract_graph: the kept set fails the cone test");
  auto& cert = res.certificate;
  cert.theta0 = wrap_angle(final_cone.center + 0.25);
  cert.cone = final_cone;
  cert.lip = res.check.lip;
  cert.atoms = k;
  for (const Point& p : pts) cert.points.emplace_back(project(cert.theta0, p), project_perp(cert.theta0, p));
  std::sort(cert.points.begin(), cert.points.end());
  res.lip_constant = cert.lip * j.length() / std::ldexp(1.0, m0);
  FixedSum mass;
  for (std::size_t a : k) mass.add(mu.weights[a]);
  res.mass = mass.value();
  return res;
}

}  // namespace favard
