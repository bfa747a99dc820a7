// SPDX-License-Identifier: MIT
#include "favard/dyadic_lattices.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "detail/hash_grid.hpp"
#include "favard/errors.hpp"

namespace favard {

namespace {

using detail::HashGrid;

constexpr double kKeyLimit = 4.0e18;

int reciprocal_base(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("rho must lie in (0, 1)");
  const double b = std::round(1.0 / rho);
  if (b < 2.0 || std::abs(b * rho - 1.0) > 1e-12) {
    throw PreconditionError("lattices need rho = 1/b for an integer b >= 2");
  }
  return static_cast<int>(b);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t checked_floor(double v) {
  if (!std::isfinite(v) || std::abs(v) > kKeyLimit) {
    throw ResourceError("lattice key out of range; narrow the level range");
  }
  return static_cast<std::int64_t>(std::floor(v));
}

double power(double rho, int m) { return std::pow(rho, m); }

double dist2(Point a, Point b) {
  const Point d = a - b;
  return dot(d, d);
}

bool lex_less(Point a, std::size_t ia, Point b, std::size_t ib) {
  if (a.x1 != b.x1) return a.x1 < b.x1;
  if (a.x2 != b.x2) return a.x2 < b.x2;
  return ia < ib;
}

std::vector<std::size_t> lex_order(const std::vector<Point>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(pts[a], a, pts[b], b); });
  return order;
}

LatticeLevel grid_level(const std::vector<Point>& atoms, const std::vector<Point>& frame_pts,
                        const std::vector<std::pair<std::int64_t, std::int64_t>>& keys, double side,
                        int m) {
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < keys.size(); ++i) groups[keys[i]].push_back(i);
  LatticeLevel out;
  out.m = m;
  out.cell_of.assign(atoms.size(), 0);
  out.cells.reserve(groups.size());
  for (auto& [k, ids] : groups) {
    const Point mid{(static_cast<double>(k.first) + 0.5) * side, (static_cast<double>(k.second) + 0.5) * side};
    std::size_t best = ids.front();
    for (std::size_t i : ids) {
      const double di = dist2(frame_pts[i], mid);
      const double db = dist2(frame_pts[best], mid);
      if (di < db || (di == db && lex_less(atoms[i], i, atoms[best], best))) best = i;
    }
    for (std::size_t i : ids) out.cell_of[i] = out.cells.size();
    out.cells.push_back({best, std::move(ids)});
  }
  return out;
}

void check_levels(int m_lo, int m_hi) {
  if (m_lo > m_hi) throw PreconditionError("lattice level range is empty");
  if (m_hi - m_lo > 64) throw ResourceError("lattice level range exceeds 65 levels");
}

std::vector<Point> frame_points(const std::vector<Point>& atoms, const AngleInterval& J) {
  std::vector<Point> out;
  out.reserve(atoms.size());
  for (Point p : atoms) out.push_back(to_metric_frame(J, p));
  return out;
}

}  // namespace

BaseLattice BaseLattice::grid(const std::vector<Point>& atoms, const AngleInterval& frame, double rho,
                              int m_lo, int m_hi) {
  const std::int64_t b = reciprocal_base(rho);
  check_levels(m_lo, m_hi);
  BaseLattice out;
  out.kind_ = LatticeKind::Grid;
  out.rho_ = rho;
  out.m_lo_ = m_lo;
  out.m_hi_ = m_hi;
  out.frame_ = frame;
  out.atoms_ = atoms;
  const auto u = frame_points(atoms, frame);
  const double finest = power(rho, m_hi);
  std::vector<std::pair<std::int64_t, std::int64_t>> fine(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    fine[i] = {checked_floor(u[i].x1 / finest), checked_floor(u[i].x2 / finest)};
  }
  out.levels_.resize(static_cast<std::size_t>(m_hi - m_lo + 1));
  for (int m = m_hi; m >= m_lo; --m) {
    const int steps = m_hi - m;
    std::int64_t div = 1;
    bool overflow = false;
    for (int s = 0; s < steps && !overflow; ++s) {
      if (div > static_cast<std::int64_t>(kKeyLimit) / b) {
        overflow = true;
      } else {
        div *= b;
      }
    }
    std::vector<std::pair<std::int64_t, std::int64_t>> keys(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (overflow) {
        keys[i] = {fine[i].first < 0 ? -1 : 0, fine[i].second < 0 ? -1 : 0};
      } else {
        keys[i] = {floor_div(fine[i].first, div), floor_div(fine[i].second, div)};
      }
    }
    out.levels_[static_cast<std::size_t>(m - m_lo)] = grid_level(atoms, u, keys, power(rho, m), m);
  }
  return out;
}

BaseLattice BaseLattice::net(const std::vector<Point>& atoms, double rho, int m_lo, int m_hi) {
  reciprocal_base(rho);
  check_levels(m_lo, m_hi);
  BaseLattice out;
  out.kind_ = LatticeKind::Net;
  out.rho_ = rho;
  out.m_lo_ = m_lo;
  out.m_hi_ = m_hi;
  out.atoms_ = atoms;
  const double sigma = (1.0 - rho) / rho;
  const auto order = lex_order(atoms);
  const std::size_t n_levels = static_cast<std::size_t>(m_hi - m_lo + 1);

  // nets[t] lists the atoms of X_{m_lo + t} in insertion order.
  std::vector<std::vector<std::size_t>> nets(n_levels);
  std::vector<char> in_net(atoms.size(), 0);
  for (std::size_t t = 0; t < n_levels; ++t) {
    const double r = sigma * power(rho, m_lo + static_cast<int>(t));
    const double r2 = r * r;
    HashGrid grid(r);
    std::vector<std::size_t> net = t == 0 ? std::vector<std::size_t>{} : nets[t - 1];
    for (std::size_t id : net) grid.insert(atoms[id], id);
    for (std::size_t id : order) {
      if (in_net[id]) continue;
      bool far = true;
      grid.near(atoms[id], [&](std::size_t q) {
        if (dist2(atoms[id], atoms[q]) <= r2) far = false;
      });
      if (!far) continue;
      in_net[id] = 1;
      net.push_back(id);
      grid.insert(atoms[id], id);
    }
    nets[t] = std::move(net);
  }

  // Nearest point of a net, ties to the earliest inserted.
  auto nearest_in = [&](std::size_t t, const std::vector<std::size_t>& queries) {
    const double r = sigma * power(rho, m_lo + static_cast<int>(t));
    HashGrid grid(r);
    std::unordered_map<std::size_t, std::size_t> rank;
    for (std::size_t i = 0; i < nets[t].size(); ++i) {
      grid.insert(atoms[nets[t][i]], nets[t][i]);
      rank[nets[t][i]] = i;
    }
    std::unordered_map<std::size_t, std::size_t> result;
    for (std::size_t q : queries) {
      std::size_t best = atoms.size();
      double bd = kInf;
      grid.near(atoms[q], [&](std::size_t c) {
        const double d = dist2(atoms[q], atoms[c]);
        if (d < bd || (d == bd && rank[c] < rank[best])) {
          bd = d;
          best = c;
        }
      });
      if (best == atoms.size()) throw InvariantError("net parent lookup found no point within the net radius");
      result[q] = best;
    }
    return result;
  };

  std::vector<std::size_t> all(atoms.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  // owner[i] is the ancestor of atom i at the level being assigned.
  std::vector<std::size_t> owner(atoms.size());
  {
    const auto top = nearest_in(n_levels - 1, all);
    for (std::size_t i = 0; i < atoms.size(); ++i) owner[i] = top.at(i);
  }
  out.levels_.resize(n_levels);
  for (std::size_t t = n_levels; t-- > 0;) {
    if (t + 1 < n_levels) {
      const auto up = nearest_in(t, nets[t + 1]);
      for (std::size_t i = 0; i < atoms.size(); ++i) owner[i] = up.at(owner[i]);
    }
    LatticeLevel lvl;
    lvl.m = m_lo + static_cast<int>(t);
    lvl.cell_of.assign(atoms.size(), 0);
    std::unordered_map<std::size_t, std::size_t> cell_index;
    for (std::size_t c : nets[t]) {
      cell_index[c] = lvl.cells.size();
      lvl.cells.push_back({c, {}});
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::size_t c = cell_index.at(owner[i]);
      lvl.cell_of[i] = c;
      lvl.cells[c].atoms.push_back(i);
    }
    out.levels_[t] = std::move(lvl);
  }
  return out;
}

const LatticeLevel& BaseLattice::level(int m) const {
  if (m < m_lo_ || m > m_hi_) {
    std::ostringstream msg;
    msg << "base level " << m << " lies outside the lattice range [" << m_lo_ << ", " << m_hi_ << "]";
    throw ResourceError(msg.str());
  }
  return levels_[static_cast<std::size_t>(m - m_lo_)];
}

LatticeLevel base_cells(const std::vector<Point>& atoms, const AngleInterval& j_interval, double rho,
                        int m) {
  return BaseLattice::grid(atoms, j_interval, rho, m, m).level(m);
}

int side_level(double length_j, int s, double rho) {
  if (!(length_j > 0.0 && length_j <= 1.0)) throw PreconditionError("side_level: H(J) must lie in (0, 1]");
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("rho must lie in (0, 1)");
  const double top = length_j * power(rho, s + 1);
  int m = static_cast<int>(std::ceil(std::log(top / 5.0) / std::log(rho)));
  while (5.0 * power(rho, m) > top) ++m;
  while (5.0 * power(rho, m - 1) <= top) --m;
  return m;
}

double AnisoCube::ball_radius(double rho) const { return 4.0 * power(rho, level); }

std::vector<AnisoCube> descend(const BaseLattice& lattice, const std::vector<std::size_t>& p,
                               const TriadicInterval& j_interval, int k, int l) {
  if (p.empty()) throw PreconditionError("descend: P is empty");
  if (l < 0) throw PreconditionError("descend: l must be nonnegative");
  const double rho = lattice.rho();
  const int s = k + l;
  const AngleInterval J = j_interval.as_interval();
  const int m = side_level(J.length(), s, rho);
  const LatticeLevel& lvl = lattice.level(m);
  const auto& atoms = lattice.atoms();

  std::map<std::size_t, std::size_t> touched;
  for (std::size_t a : p) {
    if (a >= atoms.size()) throw PreconditionError("descend: atom index out of range");
    ++touched[lvl.cell_of[a]];
  }
  std::vector<std::size_t> cells;
  cells.reserve(touched.size());
  for (auto [c, count] : touched) {
    if (count != lvl.cells[c].atoms.size()) {
      std::ostringstream msg;
      msg << "descend: P is not a union of base cells at level " << m;
      throw PreconditionError(msg.str());
    }
    cells.push_back(c);
  }
  std::vector<Point> u(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) u[i] = to_metric_frame(J, atoms[lvl.cells[cells[i]].center]);
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(u[a], lvl.cells[cells[a]].center, u[b], lvl.cells[cells[b]].center);
  });

  const double unit = power(rho, s);
  const double sep = 3.0 * unit;
  HashGrid grid(sep);
  std::vector<std::size_t> net;
  for (std::size_t i : order) {
    bool far = true;
    grid.near(u[i], [&](std::size_t q) {
      if (distance(u[i], u[q]) <= sep) far = false;
    });
    if (!far) continue;
    grid.insert(u[i], i);
    net.push_back(i);
  }
  std::unordered_map<std::size_t, std::size_t> net_rank;
  for (std::size_t r = 0; r < net.size(); ++r) net_rank[net[r]] = r;

  std::vector<AnisoCube> out(net.size());
  for (std::size_t r = 0; r < net.size(); ++r) {
    out[r].center = lvl.cells[cells[net[r]]].center;
    out[r].level = s;
    out[r].interval = j_interval;
    out[r].base_level = m;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::size_t close = net.size();
    std::size_t pretty = net.size();
    grid.near(u[i], [&](std::size_t q) {
      const double d = distance(u[i], u[q]);
      const std::size_t r = net_rank.at(q);
      if (d <= unit) close = std::min(close, r);
      if (d <= sep) pretty = std::min(pretty, r);
    });
    const std::size_t r = close < net.size() ? close : pretty;
    if (r == net.size()) throw InvariantError("descend: a base cell has no net point within 3 rho^(k+l)");
    out[r].base_cells.push_back(cells[i]);
    const auto& members = lvl.cells[cells[i]].atoms;
    out[r].atoms.insert(out[r].atoms.end(), members.begin(), members.end());
  }
  for (auto& q : out) std::sort(q.atoms.begin(), q.atoms.end());
  return out;
}

std::vector<AnisoCube> shatter(const BaseLattice& lattice, const AnisoCube& p, const TriadicInterval& j_child) {
  if (j_child.level != p.interval.level + 1 || !p.interval.contains(j_child)) {
    throw PreconditionError("shatter: J must be a child of J_P");
  }
  return descend(lattice, p.atoms, j_child, p.level, 0);
}

std::vector<AnisoCube> children(const BaseLattice& lattice, const AnisoCube& p) {
  return descend(lattice, p.atoms, p.interval, p.level, 1);
}

DescendReport check_descend(const BaseLattice& lattice, const std::vector<std::size_t>& p,
                            const std::vector<AnisoCube>& cubes, const TriadicInterval& j_interval,
                            int scale) {
  DescendReport rep;
  const auto& atoms = lattice.atoms();
  const AngleInterval J = j_interval.as_interval();
  const double unit = power(lattice.rho(), scale);

  std::unordered_map<std::size_t, std::size_t> owner;
  bool disjoint = true;
  for (std::size_t c = 0; c < cubes.size(); ++c) {
    for (std::size_t a : cubes[c].atoms) {
      if (!owner.emplace(a, c).second) disjoint = false;
    }
  }
  bool same = owner.size() == p.size();
  for (std::size_t a : p) same = same && owner.count(a) == 1;
  rep.partition = disjoint && same;

  std::vector<Point> centers(cubes.size());
  for (std::size_t c = 0; c < cubes.size(); ++c) centers[c] = to_metric_frame(J, atoms[cubes[c].center]);
  HashGrid grid(3.0 * unit);
  for (std::size_t c = 0; c < cubes.size(); ++c) grid.insert(centers[c], c);
  rep.separated = true;
  for (std::size_t c = 0; c < cubes.size(); ++c) {
    grid.near(centers[c], [&](std::size_t q) {
      if (q != c && distance(centers[c], centers[q]) <= 3.0 * unit) rep.separated = false;
    });
  }

  rep.outer_ball = true;
  for (std::size_t c = 0; c < cubes.size(); ++c) {
    for (std::size_t a : cubes[c].atoms) {
      const double d = distance(to_metric_frame(J, atoms[a]), centers[c]) / unit;
      rep.max_outer_ratio = std::max(rep.max_outer_ratio, d);
    }
  }
  rep.outer_ball = rep.max_outer_ratio <= 4.0;

  rep.inner_ball = true;
  for (std::size_t a : p) {
    const Point ua = to_metric_frame(J, atoms[a]);
    auto it = owner.find(a);
    grid.near(ua, [&](std::size_t q) {
      if (it != owner.end() && it->second == q) return;
      const double d = distance(ua, centers[q]) / unit;
      rep.min_inner_ratio = std::min(rep.min_inner_ratio, d);
    });
  }
  rep.inner_ball = !(rep.min_inner_ratio <= 0.5);
  return rep;
}

double DyadicInterval::length() const { return std::ldexp(1.0, -n); }
double DyadicInterval::lo() const { return std::ldexp(static_cast<double>(j), -n); }
double DyadicInterval::hi() const { return std::ldexp(static_cast<double>(j + 1), -n); }
DyadicInterval DyadicInterval::parent() const { return {n - 1, floor_div(j, 2)}; }

OpenSet OpenSet::from_intervals(std::vector<std::pair<double, double>> raw) {
  std::vector<std::pair<double, double>> kept;
  for (auto [a, b] : raw) {
    if (std::isnan(a) || std::isnan(b)) throw PreconditionError("open set endpoints must not be NaN");
    if (a < b) kept.emplace_back(a, b);
  }
  std::sort(kept.begin(), kept.end());
  OpenSet out;
  for (auto [a, b] : kept) {
    if (!out.parts.empty() && a < out.parts.back().second) {
      out.parts.back().second = std::max(out.parts.back().second, b);
    } else {
      out.parts.emplace_back(a, b);
    }
  }
  if (out.parts.size() == 1 && out.parts[0].first == -kInf && out.parts[0].second == kInf) {
    throw PreconditionError("whitney: U must not be all of R");
  }
  return out;
}

bool OpenSet::contains(double t) const {
  return std::any_of(parts.begin(), parts.end(), [&](const auto& q) { return q.first < t && t < q.second; });
}

bool OpenSet::contains_half_open(double lo, double hi) const {
  return std::any_of(parts.begin(), parts.end(), [&](const auto& q) { return q.first < lo && hi <= q.second; });
}

WhitneyDecomposition whitney(const OpenSet& u, double min_length, double window) {
  if (!(min_length > 0.0) || !(window > 0.0) || !std::isfinite(window)) {
    throw PreconditionError("whitney: min_length and window must be positive and finite");
  }
  if (window / min_length > std::ldexp(1.0, 48)) throw ResourceError("whitney: window / min_length exceeds 2^48");
  if (u.parts.size() == 1 && u.parts[0].first == -kInf && u.parts[0].second == kInf) {
    throw PreconditionError("whitney: U must not be all of R");
  }
  WhitneyDecomposition out;
  out.u = u;
  out.min_length = min_length;
  out.window = window;
  for (auto [a, b] : u.parts) {
    const double lo = std::max(a, -window);
    const double hi = std::min(b, window);
    if (!(lo < hi)) continue;
    const int n0 = -static_cast<int>(std::ceil(std::log2(hi - lo)));
    auto process = [&](auto&& self, DyadicInterval I) -> void {
      if (I.hi() <= lo || I.lo() >= hi) return;
      const double len = I.length();
      if (u.contains_half_open(I.lo() - len, I.hi() + len)) {
        const DyadicInterval P = I.parent();
        const double pl = P.length();
        const bool maximal = !u.contains_half_open(P.lo() - pl, P.hi() + pl);
        if (maximal && I.lo() >= lo && I.hi() <= hi) {
          out.intervals.push_back(I);
        } else {
          out.residual.emplace_back(std::max(I.lo(), lo), std::min(I.hi(), hi));
        }
        return;
      }
      if (len < min_length) {
        out.residual.emplace_back(std::max(I.lo(), lo), std::min(I.hi(), hi));
        return;
      }
      self(self, DyadicInterval{I.n + 1, 2 * I.j});
      self(self, DyadicInterval{I.n + 1, 2 * I.j + 1});
    };
    const double step = std::ldexp(1.0, -n0);
    const auto j_lo = static_cast<std::int64_t>(std::floor(lo / step));
    const auto j_hi = static_cast<std::int64_t>(std::floor(hi / step));
    for (std::int64_t j = j_lo; j <= j_hi; ++j) process(process, DyadicInterval{n0, j});
  }
  return out;
}

WhitneyReport check_whitney(const WhitneyDecomposition& w) {
  WhitneyReport rep;
  rep.triple_inside = true;
  rep.parent_triple_outside = true;
  for (const auto& I : w.intervals) {
    const double len = I.length();
    if (!w.u.contains_half_open(I.lo() - len, I.hi() + len)) rep.triple_inside = false;
    const DyadicInterval P = I.parent();
    const double pl = P.length();
    if (w.u.contains_half_open(P.lo() - pl, P.hi() + pl)) rep.parent_triple_outside = false;
  }
  std::vector<std::pair<double, double>> pieces = w.residual;
  for (const auto& I : w.intervals) pieces.emplace_back(I.lo(), I.hi());
  std::sort(pieces.begin(), pieces.end());
  rep.disjoint = true;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (pieces[i].first < pieces[i - 1].second) rep.disjoint = false;
  }
  rep.covers = true;
  std::size_t next = 0;
  for (auto [a, b] : w.u.parts) {
    const double lo = std::max(a, -w.window);
    const double hi = std::min(b, w.window);
    if (!(lo < hi)) continue;
    double reach = lo;
    while (next < pieces.size() && pieces[next].first < hi) {
      if (pieces[next].first != reach) rep.covers = false;
      reach = pieces[next].second;
      ++next;
    }
    if (reach != hi) rep.covers = false;
  }
  if (next != pieces.size()) rep.covers = false;
  return rep;
}

}  // namespace favard
