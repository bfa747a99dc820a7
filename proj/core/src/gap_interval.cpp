// SPDX-License-Identifier: MIT
#include "favard/gap_interval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "favard/errors.hpp"
#include "favard/exact_sum.hpp"

namespace favard {

int GapParams::strips_n() const { return static_cast<int>(std::ceil(c_n * a * m)); }

namespace {

void require(bool ok, const std::string& clause, const std::string& detail) {
  if (ok) return;
  throw PreconditionError("hypothesis " + clause + ": " + detail);
}

}  // namespace

GapResult find_gap_interval(const GapInstance& inst, const GapParams& params) {
  const auto& mu = inst.mu;
  const auto& pts = mu.points;
  if (!(params.alpha > 1.0) || !(params.rho > 0.0 && params.rho < 1.0) || !(params.m >= 1.0) ||
      !(params.a >= 1.0) || !(params.c_y > 0.0 && params.c_y < 1.0)) {
    throw PreconditionError("find_gap_interval: need alpha > 1, 0 < rho < 1, M >= 1, A >= 1, 0 < c_Y < 1");
  }
  if (!(inst.r > 0.0 && inst.r < inst.big_r)) throw PreconditionError("find_gap_interval: need 0 < r < R");
  if (inst.z0 >= mu.size() || inst.x >= mu.size()) throw PreconditionError("find_gap_interval: atom index out of range");
  for (std::size_t f : inst.f) {
    if (f >= mu.size()) throw PreconditionError("find_gap_interval: F atom out of range");
  }

  const AngleInterval& J = inst.j;
  const double h = J.length();
  const double r = inst.r;
  const double big_r = inst.big_r;
  const double lambda = params.lambda();
  const double big_lambda = params.big_lambda;
  GapResult res;
  res.lambda = lambda;
  res.n = params.strips_n();
  auto& hyp = res.hypotheses;

  hyp.j_ratio = h * params.m * params.a / params.c_j;
  {
    std::ostringstream d;
    d << "H(J) = " << h << " exceeds c_J / (M A) = " << params.c_j / (params.m * params.a);
    require(hyp.j_ratio <= 1.0, "(i)", d.str());
  }

  const Point z0 = pts[inst.z0];
  std::vector<std::size_t> f = inst.f;
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  require(!f.empty(), "(iii)", "F is empty");
  for (std::size_t a : f) {
    std::ostringstream d;
    d << "atom " << a << " of F lies outside B_J(z_0, R)";
    require(d_metric(J, pts[a], z0) <= big_r * (1.0 + kGeomTol), "(iii)", d.str());
  }
  FixedSum mass;
  std::vector<std::size_t> near;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (d_metric(J, pts[a], z0) <= big_lambda * r) {
      mass.add(mu.weights[a]);
      near.push_back(a);
    }
  }
  hyp.measure_ratio = mass.value() / (params.m * h * r);
  {
    std::ostringstream d;
    d << "mu(Lambda B_0) = " << mass.value() << " exceeds M H(J) r = " << params.m * h * r;
    require(hyp.measure_ratio <= 1.0, "(iii)", d.str());
  }
  for (std::size_t z : near) {
    for (std::size_t a : f) {
      ++hyp.cone_pairs;
      if (cone_contains(pts[z], J, lambda * r, big_lambda * big_r, pts[a])) {
        std::ostringstream d;
        d << "the cone X(z, J, lambda r, Lambda R) at atom " << z << " contains atom " << a << " of F";
        require(false, "(iii)", d.str());
      }
    }
  }

  require(std::binary_search(f.begin(), f.end(), inst.x), "(iv)", "x is not in F");
  {
    std::ostringstream d;
    d << "x lies outside B_0 = B_J(z_0, r)";
    require(d_metric(J, pts[inst.x], z0) <= r * (1.0 + kGeomTol), "(iv)", d.str());
  }
  const Point x = pts[inst.x];
  const AngleInterval wide{J.center, params.alpha * J.half_width};
  bool found = false;
  for (std::size_t a = 0; a < mu.size() && !found; ++a) {
    if (cone_contains(x, wide, params.rho * r, r, pts[a]) && !direction_in(J, pts[a] - x)) {
      res.y = a;
      found = true;
    }
  }
  require(found, "(iv)", "no point of E in X(x, alpha J \\ J, rho r, r)");
  hyp.witness = res.y;

  const double th = J.center;
  auto pi = [&](Point p) { return project(th, p); };
  auto pp = [&](Point p) { return project_perp(th, p); };
  const Point y = pts[res.y];
  const double d_par = std::abs(pi(x - y));
  const double d_perp = std::abs(pp(x - y));
  const double t_g = 0.5 * (pp(x) + pp(y));
  const int n = res.n;
  const double width = d_par / (2.0 * n + 1.0);

  // Lowest |pi^perp(z - x)| per strip, ties to the lower atom index.
  std::map<int, std::pair<double, std::size_t>> best;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const Point z = pts[a];
    const double s = pi(z - y);
    if (std::abs(pp(z) - t_g) > 2.0 * d_perp || std::abs(s) > 0.5 * d_par) continue;
    const int i = std::clamp(static_cast<int>(std::lround(s / width)), -n, n);
    const double v = std::abs(pp(z - x));
    auto it = best.find(i);
    if (it == best.end() || v < it->second.first) best[i] = {v, a};
  }
  auto value = [&](int i) {
    auto it = best.find(i);
    return it == best.end() ? kInf : it->second.first;
  };
  int i = 0;
  res.chain_steps = 1;
  for (;;) {
    if (i <= -n || i >= n) {
      std::ostringstream msg;
      msg << "beats chain reached the outer strip " << i << " of " << n << " after " << res.chain_steps
          << " steps; the measure bound fails on this instance";
      throw InvariantError(msg.str());
    }
    const double vl = value(i - 1);
    const double vr = value(i + 1);
    const double vi = value(i);
    if (vi <= vl && vi <= vr) break;
    i = vr < vl || (vr == vl && vr < vi) ? i + 1 : i - 1;
    ++res.chain_steps;
  }
  res.i_star = i;
  res.z_star = best.at(i).second;
  const Point zs = pts[res.z_star];
  const double gap = std::abs(pp(zs - x));
  if (!(gap > 0.0)) throw InvariantError("z_* and x have the same perpendicular projection");
  res.z_star_ratio = gap / (h * r);

  const double c = params.c_y * lambda;
  const double t_y = c * pp(x) + (1.0 - c) * pp(zs);
  const double half = 0.5 * c * gap;
  res.lo = t_y - half;
  res.hi = t_y + half;
  res.length_ratio = res.length() / (lambda * h * r);

  res.disjoint = std::none_of(f.begin(), f.end(), [&](std::size_t a) {
    const double t = pp(pts[a]);
    return t >= res.lo && t <= res.hi;
  });
  res.tube_empty = std::none_of(f.begin(), f.end(), [&](std::size_t a) {
    const Point z = pts[a];
    return std::abs(pp(z) - t_y) <= half && std::abs(pi(z - zs)) <= 0.5 * big_lambda * big_r;
  });
  const double scale = big_lambda / lambda;
  const double lo = res.center() - 0.5 * scale * res.length();
  const double hi = res.center() + 0.5 * scale * res.length();
  res.ball_inside = lo <= pp(z0) - h * r && pp(z0) + h * r <= hi;
  return res;
}

}  // namespace favard
