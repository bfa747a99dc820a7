// SPDX-License-Identifier: MIT
// Finite models of a set E and of the measure mu = H^1|_E: segment unions,
// dyadic square sets, the 4-corners Cantor generations, skeletons, atom
// discretizations and the content and regularity estimators.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "favard/torus_geometry.hpp"

namespace favard {

struct Segment {
  Point a;
  Point b;

  double length() const { return distance(a, b); }
  // Direction angle in [0, 1/2).
  double direction() const;
  Point midpoint() const { return 0.5 * (a + b); }
  bool horizontal() const { return a.x2 == b.x2; }
  bool vertical() const { return a.x1 == b.x1; }
};

struct Box {
  Point lo{kInf, kInf};
  Point hi{-kInf, -kInf};

  void extend(Point p);
  bool empty() const { return lo.x1 > hi.x1; }
  double width() const { return hi.x1 - lo.x1; }
  double height() const { return hi.x2 - lo.x2; }
  double diagonal() const { return empty() ? 0.0 : std::hypot(width(), height()); }
  Point center() const { return 0.5 * (lo + hi); }
};

struct SegmentUnion {
  std::vector<Segment> segments;
  std::optional<double> parallel_hint;

  bool empty() const { return segments.empty(); }
  std::size_t size() const { return segments.size(); }
  double total_length() const;
  double min_length() const;
  Box bbox() const;
  double diameter() const;
  // Throws PreconditionError when a segment is degenerate or disagrees with
  // the parallel hint.
  void validate() const;
};

struct DyadicSquareSet {
  int level = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> cells;

  double side() const;
  Box cell_box(std::size_t i) const;
  Box bbox() const;
  // Sorts the cells and removes duplicates.
  void normalize();
};

struct DiscreteMeasure {
  std::vector<Point> points;
  std::vector<double> weights;
  // Index of the segment each atom was cut from, or -1.
  std::vector<std::int64_t> source;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double total_mass() const;
  void push(Point p, double w, std::int64_t src = -1);
  DiscreteMeasure subset(const std::vector<std::size_t>& ids) const;
};

// K_n: 4^n cells at level 2n with base-4 digits in {0, 3}.
DyadicSquareSet four_corners(int n);

// Union of the cell boundaries with shared edges listed once.
SegmentUnion skeleton(const DyadicSquareSet& e);

// Horizontal and vertical parts of an axis-parallel segment union.
std::pair<SegmentUnion, SegmentUnion> split_parallel(const SegmentUnion& s);

// Atom pitch used by discretize when none is given: min length / 64.
double default_pitch(const SegmentUnion& e);

// Cuts each segment into ceil(L/h) equal pieces and places an atom of mass
// equal to the piece length at each piece midpoint.
DiscreteMeasure discretize(const SegmentUnion& e, double pitch);
// One atom per cell at its center, weighted by the side length.
DiscreteMeasure discretize(const DyadicSquareSet& e);

// Largest sampled value of max(H(E cap B(x,r))/r, r/H(E cap B(x,r))).
double ahlfors_constant(const SegmentUnion& e, std::size_t sample_count, std::uint64_t seed,
                        int workers = 1);
double ahlfors_constant(const DyadicSquareSet& e, std::size_t sample_count, std::uint64_t seed,
                        int workers = 1);

// A compact piece of a set: every point lies within `slack` of `center`.
struct ContentPiece {
  Point center;
  double slack = 0.0;
  double mass = 0.0;
};

std::vector<ContentPiece> content_pieces(const SegmentUnion& e, double piece_length);
std::vector<ContentPiece> content_pieces(const DyadicSquareSet& e);

// Greedy upper estimate of the Hausdorff content with balls of radius >= delta.
double hausdorff_content(const std::vector<ContentPiece>& pieces, double delta);
double hausdorff_content(const SegmentUnion& e, double delta);
double hausdorff_content(const DyadicSquareSet& e, double delta);

// E(delta) on the dyadic grid of level ceil(log2(1/delta)): the cells whose
// closed delta-neighbourhood in the max norm meets E.
DyadicSquareSet neighborhood(const SegmentUnion& e, double delta);
DyadicSquareSet neighborhood(const DyadicSquareSet& e, double delta);

// Parts of a polyline inside a square set.
SegmentUnion clip_to_cells(const std::vector<Point>& polyline, const DyadicSquareSet& cells);
// Pieces of E lying within distance `radius` of a polyline.
std::vector<ContentPiece> pieces_near_polyline(const SegmentUnion& e,
                                               const std::vector<Point>& polyline, double radius,
                                               double piece_length);
std::vector<ContentPiece> pieces_near_polyline(const DyadicSquareSet& e,
                                               const std::vector<Point>& polyline, double radius);

double point_segment_distance(Point p, const Segment& s);
// Clips the segment to the closed box; false when they do not meet.
bool clip_segment(const Segment& s, const Box& box, Segment& out);

// File formats: segment CSV lines "x1,y1,x2,y2", polyline CSV lines "x,y",
// square sets as JSON {"level": k, "cells": [[i, j], ...]}.
SegmentUnion read_segments_csv(const std::string& path);
SegmentUnion parse_segments_csv(const std::string& text);
void write_segments_csv(const std::string& path, const SegmentUnion& e);
std::vector<Point> read_polyline_csv(const std::string& path);
DyadicSquareSet read_squares_json(const std::string& path);
DyadicSquareSet parse_squares_json(const std::string& text);
void write_squares_json(const std::string& path, const DyadicSquareSet& e);
// True when the file looks like a JSON square set rather than a CSV.
bool is_square_file(const std::string& path);
std::string read_file(const std::string& path);

}  // namespace favard
