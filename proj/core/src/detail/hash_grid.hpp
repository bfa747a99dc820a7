// SPDX-License-Identifier: MIT
// Bucket grid over points of the plane for radius queries.
#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "favard/errors.hpp"
#include "favard/torus_geometry.hpp"

namespace favard::detail {

struct CellKeyHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
    const auto a = static_cast<std::uint64_t>(k.first);
    const auto b = static_cast<std::uint64_t>(k.second);
    return static_cast<std::size_t>(a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL + (a << 6)));
  }
};

class HashGrid {
 public:
  explicit HashGrid(double cell) : cell_(cell) {}

  void insert(Point p, std::size_t id) { buckets_[key(p)].push_back(id); }

  // Calls fn on every id in the 3 x 3 block of cells around p, which covers
  // the closed ball of radius `cell` about p.
  template <class Fn>
  void near(Point p, Fn&& fn) const {
    visit(p, 1, fn);
  }

  // Calls fn on every id whose cell meets the square of half-side radius
  // about p; a superset of the ball of that radius.
  template <class Fn>
  void within(Point p, double radius, Fn&& fn) const {
    const double rings = std::ceil(radius / cell_);
    if (rings > 4096.0) throw ResourceError("radius query spans too many grid cells");
    visit(p, static_cast<std::int64_t>(rings), fn);
  }

 private:
  template <class Fn>
  void visit(Point p, std::int64_t rings, Fn&& fn) const {
    const auto [kx, ky] = key(p);
    if ((2 * rings + 1) * (2 * rings + 1) > static_cast<std::int64_t>(buckets_.size())) {
      for (const auto& [k, ids] : buckets_) {
        if (k.first < kx - rings || k.first > kx + rings || k.second < ky - rings || k.second > ky + rings) continue;
        for (std::size_t id : ids) fn(id);
      }
      return;
    }
    for (std::int64_t dx = -rings; dx <= rings; ++dx) {
      for (std::int64_t dy = -rings; dy <= rings; ++dy) {
        auto it = buckets_.find({kx + dx, ky + dy});
        if (it == buckets_.end()) continue;
        for (std::size_t id : it->second) fn(id);
      }
    }
  }

  std::pair<std::int64_t, std::int64_t> key(Point p) const {
    const double a = std::floor(p.x1 / cell_);
    const double b = std::floor(p.x2 / cell_);
    if (!(std::abs(a) < 4.0e18 && std::abs(b) < 4.0e18)) throw ResourceError("grid key out of range");
    return {static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)};
  }

  double cell_;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, CellKeyHash> buckets_;
};

}  // namespace favard::detail
