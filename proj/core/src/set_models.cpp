// SPDX-License-Identifier: MIT
#include "favard/set_models.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "favard/errors.hpp"
#include "favard/parallel.hpp"
#include "json.hpp"

namespace favard {

double Segment::direction() const {
  const Point d = b - a;
  double t = std::atan2(d.x2, d.x1) / kTwoPi;
  t = wrap_angle(t);
  if (t >= 0.5) t -= 0.5;
  return t >= 0.5 ? 0.0 : t;
}

void Box::extend(Point p) {
  lo.x1 = std::min(lo.x1, p.x1);
  lo.x2 = std::min(lo.x2, p.x2);
  hi.x1 = std::max(hi.x1, p.x1);
  hi.x2 = std::max(hi.x2, p.x2);
}

double SegmentUnion::total_length() const {
  std::vector<double> l;
  l.reserve(segments.size());
  for (const auto& s : segments) l.push_back(s.length());
  return pairwise_sum(l.data(), l.size());
}

double SegmentUnion::min_length() const {
  double m = kInf;
  for (const auto& s : segments) m = std::min(m, s.length());
  return m;
}

Box SegmentUnion::bbox() const {
  Box b;
  for (const auto& s : segments) {
    b.extend(s.a);
    b.extend(s.b);
  }
  return b;
}

double SegmentUnion::diameter() const {
  std::vector<Point> pts;
  for (const auto& s : segments) {
    pts.push_back(s.a);
    pts.push_back(s.b);
  }
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
  }
  return d;
}

void SegmentUnion::validate() const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!std::isfinite(s.a.x1) || !std::isfinite(s.a.x2) || !std::isfinite(s.b.x1) ||
        !std::isfinite(s.b.x2)) {
      throw PreconditionError("segment " + std::to_string(i) + " has a non-finite coordinate");
    }
    if (s.a == s.b) throw PreconditionError("segment " + std::to_string(i) + " is degenerate");
    if (parallel_hint && std::fabs(arc_delta(2.0 * s.direction(), 2.0 * *parallel_hint)) > 2e-12) {
      throw PreconditionError("segment " + std::to_string(i) + " is not parallel to the hint");
    }
  }
}

double DyadicSquareSet::side() const { return std::ldexp(1.0, -level); }

Box DyadicSquareSet::cell_box(std::size_t i) const {
  const double s = side();
  const auto [a, b] = cells[i];
  Box box;
  box.lo = {static_cast<double>(a) * s, static_cast<double>(b) * s};
  box.hi = {static_cast<double>(a + 1) * s, static_cast<double>(b + 1) * s};
  return box;
}

Box DyadicSquareSet::bbox() const {
  Box b;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Box c = cell_box(i);
    b.extend(c.lo);
    b.extend(c.hi);
  }
  return b;
}

void DyadicSquareSet::normalize() {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
}

double DiscreteMeasure::total_mass() const { return pairwise_sum(weights.data(), weights.size()); }

void DiscreteMeasure::push(Point p, double w, std::int64_t src) {
  points.push_back(p);
  weights.push_back(w);
  source.push_back(src);
}

DiscreteMeasure DiscreteMeasure::subset(const std::vector<std::size_t>& ids) const {
  DiscreteMeasure out;
  for (std::size_t i : ids) out.push(points[i], weights[i], source.empty() ? -1 : source[i]);
  return out;
}

DyadicSquareSet four_corners(int n) {
  if (n < 0) throw PreconditionError("four_corners: n must be nonnegative");
  if (n > 12) throw ResourceError("four_corners: n > 12 exceeds the cell budget");
  DyadicSquareSet k{2 * n, {{0, 0}}};
  for (int g = 0; g < n; ++g) {
    std::vector<std::pair<std::int64_t, std::int64_t>> next;
    next.reserve(k.cells.size() * 4);
    for (auto [i, j] : k.cells) {
      for (std::int64_t di : {0, 3}) {
        for (std::int64_t dj : {0, 3}) next.emplace_back(4 * i + di, 4 * j + dj);
      }
    }
    k.cells = std::move(next);
  }
  k.normalize();
  return k;
}

SegmentUnion skeleton(const DyadicSquareSet& e) {
  if (e.cells.empty()) throw PreconditionError("skeleton: empty square set");
  // (orientation, x, y): 0 = horizontal edge from (x,y) to (x+1,y), 1 = vertical.
  std::set<std::tuple<int, std::int64_t, std::int64_t>> edges;
  for (auto [i, j] : e.cells) {
    edges.emplace(0, i, j);
    edges.emplace(0, i, j + 1);
    edges.emplace(1, i, j);
    edges.emplace(1, i + 1, j);
  }
  const double s = e.side();
  SegmentUnion out;
  for (auto [o, x, y] : edges) {
    const Point a{static_cast<double>(x) * s, static_cast<double>(y) * s};
    const Point b = o == 0 ? Point{static_cast<double>(x + 1) * s, a.x2}
                           : Point{a.x1, static_cast<double>(y + 1) * s};
    out.segments.push_back({a, b});
  }
  return out;
}

std::pair<SegmentUnion, SegmentUnion> split_parallel(const SegmentUnion& s) {
  SegmentUnion h, v;
  h.parallel_hint = 0.0;
  v.parallel_hint = 0.25;
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& seg = s.segments[i];
    if (seg.horizontal()) {
      h.segments.push_back(seg);
    } else if (seg.vertical()) {
      v.segments.push_back(seg);
    } else {
      throw PreconditionError("split_parallel: segment " + std::to_string(i) + " is oblique");
    }
  }
  return {h, v};
}

double default_pitch(const SegmentUnion& e) {
  if (e.empty()) throw PreconditionError("default_pitch: empty segment union");
  return e.min_length() / 64.0;
}

DiscreteMeasure discretize(const SegmentUnion& e, double pitch) {
  if (!(pitch > 0.0)) throw PreconditionError("discretize: pitch must be positive");
  DiscreteMeasure mu;
  for (std::size_t i = 0; i < e.segments.size(); ++i) {
    const auto& s = e.segments[i];
    const double len = s.length();
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / pitch - 1e-9)));
    if (mu.size() + n > (std::size_t{1} << 24)) throw ResourceError("discretize: too many atoms");
    const double w = len / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
      mu.push(s.a + t * (s.b - s.a), w, static_cast<std::int64_t>(i));
    }
  }
  return mu;
}

DiscreteMeasure discretize(const DyadicSquareSet& e) {
  DiscreteMeasure mu;
  const double s = e.side();
  for (std::size_t i = 0; i < e.cells.size(); ++i) mu.push(e.cell_box(i).center(), s, -1);
  return mu;
}

namespace {

double chord_length(const Segment& s, Point x, double r) {
  const Point d = s.b - s.a;
  const Point f = s.a - x;
  const double a = dot(d, d);
  const double b = 2.0 * dot(f, d);
  const double c = dot(f, f) - r * r;
  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  const double t0 = std::max(0.0, (-b - sq) / (2.0 * a));
  const double t1 = std::min(1.0, (-b + sq) / (2.0 * a));
  return t1 > t0 ? (t1 - t0) * std::sqrt(a) : 0.0;
}

double regularity_ratio(double mass, double r) {
  if (!(mass > 0.0)) return kInf;
  return std::max(mass / r, r / mass);
}

template <class Eval>
double sharded_max(std::size_t n, int workers, Eval&& eval) {
  std::vector<double> best(static_cast<std::size_t>(std::max(1, workers)), 0.0);
  parallel_shards(n, workers, [&](std::size_t shard, std::size_t b, std::size_t e) {
    double m = 0.0;
    for (std::size_t i = b; i < e; ++i) m = std::max(m, eval(i));
    best[shard] = m;
  });
  return *std::max_element(best.begin(), best.end());
}

}  // namespace

double ahlfors_constant(const SegmentUnion& e, std::size_t sample_count, std::uint64_t seed,
                        int workers) {
  if (e.empty()) throw PreconditionError("ahlfors_constant: empty set");
  if (sample_count == 0) throw PreconditionError("ahlfors_constant: sample_count must be >= 1");
  const double diam = e.diameter();
  std::vector<double> cum;
  double acc = 0.0;
  for (const auto& s : e.segments) cum.push_back(acc += s.length());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<Point, double>> draws(sample_count);
  for (auto& d : draws) {
    const double u1 = unif(rng) * acc;
    const double u2 = unif(rng);
    const double u3 = unif(rng);
    auto it = std::upper_bound(cum.begin(), cum.end(), u1);
    const std::size_t k = std::min<std::size_t>(it - cum.begin(), e.size() - 1);
    const auto& s = e.segments[k];
    d.first = s.a + u2 * (s.b - s.a);
    d.second = diam * std::exp(std::log(1e-4) * u3);
  }
  return sharded_max(sample_count, workers, [&](std::size_t i) {
    const auto [x, r] = draws[i];
    double m = 0.0;
    for (const auto& s : e.segments) m += chord_length(s, x, r);
    return regularity_ratio(m, r);
  });
}

double ahlfors_constant(const DyadicSquareSet& e, std::size_t sample_count, std::uint64_t seed,
                        int workers) {
  if (e.cells.empty()) throw PreconditionError("ahlfors_constant: empty set");
  if (sample_count == 0) throw PreconditionError("ahlfors_constant: sample_count must be >= 1");
  const DiscreteMeasure mu = discretize(e);
  const double side = e.side();
  const double diam = e.bbox().diagonal();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<Point, double>> draws(sample_count);
  for (auto& d : draws) {
    const double u1 = unif(rng);
    const double u2 = unif(rng);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(u1 * mu.size()), mu.size() - 1);
    d.first = mu.points[k];
    d.second = diam > side ? side * std::exp(std::log(diam / side) * u2) : side;
  }
  return sharded_max(sample_count, workers, [&](std::size_t i) {
    const auto [x, r] = draws[i];
    std::size_t count = 0;
    for (const auto& p : mu.points) count += distance(p, x) <= r ? 1 : 0;
    return regularity_ratio(static_cast<double>(count) * side, r);
  });
}

std::vector<ContentPiece> content_pieces(const SegmentUnion& e, double piece_length) {
  if (!(piece_length > 0.0)) throw PreconditionError("content_pieces: piece length must be positive");
  std::vector<ContentPiece> out;
  for (const auto& s : e.segments) {
    const double len = s.length();
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / piece_length - 1e-9)));
    const double pl = len / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
      out.push_back({s.a + t * (s.b - s.a), 0.5 * pl, pl});
    }
  }
  return out;
}

std::vector<ContentPiece> content_pieces(const DyadicSquareSet& e) {
  std::vector<ContentPiece> out;
  const double s = e.side();
  for (std::size_t i = 0; i < e.cells.size(); ++i) {
    out.push_back({e.cell_box(i).center(), s * std::sqrt(0.5), s});
  }
  return out;
}

double hausdorff_content(const std::vector<ContentPiece>& pieces, double delta) {
  if (delta < 0.0) throw PreconditionError("hausdorff_content: delta must be nonnegative");
  if (pieces.empty()) return 0.0;
  Box box;
  double min_slack = kInf;
  for (const auto& p : pieces) {
    box.extend(p.center);
    min_slack = std::max(0.0, std::min(min_slack, p.slack));
  }
  const Point c0 = box.center();
  double single = 0.0;
  for (const auto& p : pieces) single = std::max(single, distance(p.center, c0) + p.slack);
  single = std::max(single, delta);

  const std::size_t n = pieces.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 256);
  std::vector<Point> candidates;
  for (std::size_t i = 0; i < n; i += stride) candidates.push_back(pieces[i].center);
  candidates.push_back(c0);

  const double r0 = std::max({delta, min_slack, single * 1e-6});
  const double step = std::sqrt(2.0);
  const int levels = static_cast<int>(std::ceil(std::log(single / r0) / std::log(step))) + 1;
  auto radius_of = [&](int lvl) { return std::max(delta, r0 * std::pow(step, lvl)); };

  std::vector<char> covered(n, 0);
  std::size_t remaining = n;
  double total = 0.0;
  std::vector<double> bucket(static_cast<std::size_t>(levels) + 1);
  while (remaining > 0 && total < single) {
    std::size_t first = 0;
    while (covered[first]) ++first;
    candidates.push_back(pieces[first].center);
    double best_ratio = -1.0;
    Point best_c{};
    double best_r = 0.0;
    for (const Point& c : candidates) {
      std::fill(bucket.begin(), bucket.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (covered[i]) continue;
        const double need = distance(pieces[i].center, c) + pieces[i].slack;
        int lvl = need <= r0 ? 0 : static_cast<int>(std::ceil(std::log(need / r0) / std::log(step) - 1e-12));
        while (lvl < levels && radius_of(lvl) < need) ++lvl;
        if (lvl <= levels) bucket[static_cast<std::size_t>(lvl)] += pieces[i].mass;
      }
      double cum = 0.0;
      for (int l = 0; l <= levels; ++l) {
        cum += bucket[static_cast<std::size_t>(l)];
        if (cum <= 0.0) continue;
        const double r = radius_of(l);
        const double ratio = cum / r;
        if (ratio > best_ratio * (1.0 + 1e-12)) {
          best_ratio = ratio;
          best_c = c;
          best_r = r;
        }
      }
    }
    candidates.pop_back();
    if (best_ratio < 0.0) break;
    total += best_r;
    for (std::size_t i = 0; i < n; ++i) {
      if (!covered[i] && distance(pieces[i].center, best_c) + pieces[i].slack <= best_r) {
        covered[i] = 1;
        --remaining;
      }
    }
  }
  return remaining == 0 ? std::min(total, single) : single;
}

double hausdorff_content(const SegmentUnion& e, double delta) {
  if (e.empty()) return 0.0;
  const double pl = std::max(delta / 2.0, e.total_length() / 1024.0);
  return hausdorff_content(content_pieces(e, pl), delta);
}

double hausdorff_content(const DyadicSquareSet& e, double delta) {
  return hausdorff_content(content_pieces(e), delta);
}

bool clip_segment(const Segment& s, const Box& box, Segment& out) {
  double t0 = 0.0, t1 = 1.0;
  const Point d = s.b - s.a;
  const double p[4] = {-d.x1, d.x1, -d.x2, d.x2};
  const double q[4] = {s.a.x1 - box.lo.x1, box.hi.x1 - s.a.x1, s.a.x2 - box.lo.x2,
                       box.hi.x2 - s.a.x2};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  out = {s.a + t0 * d, s.a + t1 * d};
  return true;
}

double point_segment_distance(Point p, const Segment& s) {
  const Point d = s.b - s.a;
  const double l2 = dot(d, d);
  if (l2 == 0.0) return distance(p, s.a);
  const double t = std::clamp(dot(p - s.a, d) / l2, 0.0, 1.0);
  return distance(p, s.a + t * d);
}

namespace {

int grid_level(double delta) {
  if (!(delta > 0.0)) throw PreconditionError("neighborhood: delta must be positive");
  return std::max(0, static_cast<int>(std::ceil(std::log2(1.0 / delta) - 1e-12)));
}

void check_budget(double cells) {
  if (cells > static_cast<double>(1 << 22)) throw ResourceError("neighborhood: grid too fine");
}

}  // namespace

DyadicSquareSet neighborhood(const SegmentUnion& e, double delta) {
  DyadicSquareSet out;
  out.level = grid_level(delta);
  const double s = out.side();
  for (const auto& seg : e.segments) {
    Box b;
    b.extend(seg.a);
    b.extend(seg.b);
    const auto i0 = static_cast<std::int64_t>(std::floor((b.lo.x1 - delta) / s));
    const auto i1 = static_cast<std::int64_t>(std::floor((b.hi.x1 + delta) / s));
    const auto j0 = static_cast<std::int64_t>(std::floor((b.lo.x2 - delta) / s));
    const auto j1 = static_cast<std::int64_t>(std::floor((b.hi.x2 + delta) / s));
    check_budget(static_cast<double>(i1 - i0 + 1) * static_cast<double>(j1 - j0 + 1));
    for (auto i = i0; i <= i1; ++i) {
      for (auto j = j0; j <= j1; ++j) {
        Box cell;
        cell.lo = {static_cast<double>(i) * s - delta, static_cast<double>(j) * s - delta};
        cell.hi = {static_cast<double>(i + 1) * s + delta, static_cast<double>(j + 1) * s + delta};
        Segment tmp;
        if (clip_segment(seg, cell, tmp)) out.cells.emplace_back(i, j);
      }
    }
  }
  out.normalize();
  return out;
}

DyadicSquareSet neighborhood(const DyadicSquareSet& e, double delta) {
  DyadicSquareSet out;
  out.level = grid_level(delta);
  const double s = out.side();
  for (std::size_t k = 0; k < e.cells.size(); ++k) {
    const Box b = e.cell_box(k);
    const auto i0 = static_cast<std::int64_t>(std::ceil((b.lo.x1 - delta) / s)) - 1;
    const auto i1 = static_cast<std::int64_t>(std::floor((b.hi.x1 + delta) / s));
    const auto j0 = static_cast<std::int64_t>(std::ceil((b.lo.x2 - delta) / s)) - 1;
    const auto j1 = static_cast<std::int64_t>(std::floor((b.hi.x2 + delta) / s));
    check_budget(static_cast<double>(i1 - i0 + 1) * static_cast<double>(j1 - j0 + 1));
    for (auto i = i0; i <= i1; ++i) {
      for (auto j = j0; j <= j1; ++j) out.cells.emplace_back(i, j);
    }
  }
  out.normalize();
  return out;
}

SegmentUnion clip_to_cells(const std::vector<Point>& polyline, const DyadicSquareSet& cells) {
  SegmentUnion out;
  const double s = cells.side();
  for (std::size_t e = 0; e + 1 < polyline.size(); ++e) {
    const Segment seg{polyline[e], polyline[e + 1]};
    Box b;
    b.extend(seg.a);
    b.extend(seg.b);
    const auto i0 = static_cast<std::int64_t>(std::floor(b.lo.x1 / s)) - 1;
    const auto i1 = static_cast<std::int64_t>(std::floor(b.hi.x1 / s));
    const auto j0 = static_cast<std::int64_t>(std::floor(b.lo.x2 / s)) - 1;
    const auto j1 = static_cast<std::int64_t>(std::floor(b.hi.x2 / s));
    check_budget(static_cast<double>(i1 - i0 + 1) * static_cast<double>(j1 - j0 + 1));
    for (auto i = i0; i <= i1; ++i) {
      for (auto j = j0; j <= j1; ++j) {
        if (!std::binary_search(cells.cells.begin(), cells.cells.end(), std::make_pair(i, j))) continue;
        Box cell;
        cell.lo = {static_cast<double>(i) * s, static_cast<double>(j) * s};
        cell.hi = {static_cast<double>(i + 1) * s, static_cast<double>(j + 1) * s};
        Segment piece;
        if (clip_segment(seg, cell, piece) && piece.length() > 0.0) out.segments.push_back(piece);
      }
    }
  }
  return out;
}

namespace {

double polyline_distance(Point p, const std::vector<Point>& polyline) {
  if (polyline.size() == 1) return distance(p, polyline[0]);
  double d = kInf;
  for (std::size_t e = 0; e + 1 < polyline.size(); ++e) {
    d = std::min(d, point_segment_distance(p, {polyline[e], polyline[e + 1]}));
  }
  return d;
}

}  // namespace

std::vector<ContentPiece> pieces_near_polyline(const SegmentUnion& e,
                                               const std::vector<Point>& polyline, double radius,
                                               double piece_length) {
  std::vector<ContentPiece> out;
  if (polyline.empty()) return out;
  for (const auto& p : content_pieces(e, piece_length)) {
    if (polyline_distance(p.center, polyline) <= radius) out.push_back(p);
  }
  return out;
}

std::vector<ContentPiece> pieces_near_polyline(const DyadicSquareSet& e,
                                               const std::vector<Point>& polyline, double radius) {
  std::vector<ContentPiece> out;
  if (polyline.empty()) return out;
  for (const auto& p : content_pieces(e)) {
    if (polyline_distance(p.center, polyline) <= radius) out.push_back(p);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

bool blank_or_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::vector<double> parse_numbers(const std::string& line, std::size_t expected, std::size_t lineno) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    if (b == std::string::npos) throw IoError("line " + std::to_string(lineno) + ": empty field");
    const std::string tok = field.substr(b, e - b + 1);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v)) {
      throw IoError("line " + std::to_string(lineno) + ": invalid number '" + tok + "'");
    }
    vals.push_back(v);
  }
  if (vals.size() != expected) {
    throw IoError("line " + std::to_string(lineno) + ": expected " + std::to_string(expected) +
                  " comma-separated numbers, found " + std::to_string(vals.size()));
  }
  return vals;
}

}  // namespace

SegmentUnion parse_segments_csv(const std::string& text) {
  SegmentUnion out;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    const auto v = parse_numbers(line, 4, lineno);
    const Segment s{{v[0], v[1]}, {v[2], v[3]}};
    if (s.a == s.b) throw IoError("line " + std::to_string(lineno) + ": degenerate segment");
    out.segments.push_back(s);
  }
  if (out.empty()) throw PreconditionError("segment file contains no segments");
  return out;
}

SegmentUnion read_segments_csv(const std::string& path) { return parse_segments_csv(read_file(path)); }

void write_segments_csv(const std::string& path, const SegmentUnion& e) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  for (const auto& s : e.segments) out << s.a.x1 << ',' << s.a.x2 << ',' << s.b.x1 << ',' << s.b.x2 << '\n';
}

std::vector<Point> read_polyline_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<Point> out;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    const auto v = parse_numbers(line, 2, lineno);
    out.push_back({v[0], v[1]});
  }
  if (out.empty()) throw PreconditionError("polyline file contains no points");
  return out;
}

DyadicSquareSet parse_squares_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("square set: ") + e.what());
  }
  DyadicSquareSet out;
  try {
    out.level = j.at("level").get<int>();
    for (const auto& c : j.at("cells")) {
      out.cells.emplace_back(c.at(0).get<std::int64_t>(), c.at(1).get<std::int64_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("square set: ") + e.what());
  }
  if (out.level < 0 || out.level > 40) throw IoError("square set: level out of range");
  const std::int64_t n = std::int64_t{1} << out.level;
  for (auto [a, b] : out.cells) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw IoError("square set: cell index out of range");
  }
  if (out.cells.empty()) throw PreconditionError("square set contains no cells");
  out.normalize();
  return out;
}

DyadicSquareSet read_squares_json(const std::string& path) { return parse_squares_json(read_file(path)); }

void write_squares_json(const std::string& path, const DyadicSquareSet& e) {
  nlohmann::json j;
  j["level"] = e.level;
  j["cells"] = nlohmann::json::array();
  for (auto [a, b] : e.cells) j["cells"].push_back({a, b});
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump() << '\n';
}

bool is_square_file(const std::string& path) {
  const std::string text = read_file(path);
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text[pos] == '{';
}

}  // namespace favard
