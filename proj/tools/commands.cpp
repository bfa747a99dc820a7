// SPDX-License-Identifier: MIT
#include "commands.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "favard/conical_analysis.hpp"
#include "favard/direction_tree.hpp"
#include "favard/dyadic_lattices.hpp"
#include "favard/errors.hpp"
#include "favard/graph_extractor.hpp"
#include "favard/parallel.hpp"
#include "favard/projection_engine.hpp"
#include "favard/set_models.hpp"

namespace favard::cli {

using nlohmann::json;

namespace {

struct LoadedInput {
  std::string path;
  std::string sha;
  std::size_t bytes = 0;
  bool squares = false;
  DyadicSquareSet cells;
  SegmentUnion segments;
};

LoadedInput load_input(const std::string& path) {
  LoadedInput in;
  in.path = path;
  const std::string text = read_file(path);
  in.sha = sha256_hex(text);
  in.bytes = text.size();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    in.squares = true;
    in.cells = parse_squares_json(text);
    in.segments = skeleton(in.cells);
  } else {
    in.segments = parse_segments_csv(text);
  }
  if (in.segments.empty()) throw PreconditionError(path + ": the input contains no segments");
  in.segments.validate();
  return in;
}

json input_entry(const std::string& path, const std::string& sha, std::size_t bytes) {
  return {{"path", path}, {"sha256", sha}, {"bytes", bytes}};
}

json input_entry(const LoadedInput& in) { return input_entry(in.path, in.sha, in.bytes); }

CommandOutput begin(const std::string& command, const ExperimentConfig& cfg) {
  CommandOutput out;
  out.command = command;
  out.report["command"] = command;
  out.report["config"] = json::parse(config_to_json(cfg));
  out.report["inputs"] = json::array();
  out.report["invariants"] = json::object();
  return out;
}

double pitch_for(const ExperimentConfig& cfg, const SegmentUnion& e) {
  return cfg.pitch > 0.0 ? cfg.pitch : default_pitch(e);
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

json number_or_label(double v, const char* label) {
  if (std::isfinite(v)) return v;
  return label;
}

template <class F>
auto in_stage(const std::string& name, F&& f) {
  const std::string prefix = "stage " + name + ": ";
  try {
    return f();
  } catch (const ResourceError& e) {
    throw ResourceError(prefix + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(prefix + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(prefix + e.what());
  }
}

struct ParallelPart {
  SegmentUnion e;
  double phi = 0.0;
  DiscreteMeasure base;
  double fav = 0.0;
  double total = 0.0;
};

// Square sets are skeletonized and split; segment inputs must be parallel
// and axis-aligned.
ParallelPart parallel_part(const LoadedInput& in, const ExperimentConfig& cfg, double kappa, json& report) {
  ParallelPart p;
  const auto [h, v] = split_parallel(in.segments);
  if (!in.squares && !h.empty() && !v.empty()) {
    throw PreconditionError("stage 0 input: segments must all be horizontal or all vertical");
  }
  p.e = h.empty() ? v : h;
  p.phi = h.empty() ? 0.25 : 0.0;
  p.total = p.e.total_length();
  p.fav = favard_length(p.e, cfg.n_angles, cfg.workers);
  p.base = discretize(p.e, pitch_for(cfg, p.e));
  report["input_set"] = {{"segments", p.e.size()},
                         {"direction", p.phi},
                         {"length", p.total},
                         {"favard", p.fav},
                         {"favard_ratio", p.fav / p.total},
                         {"kappa", kappa},
                         {"atoms", p.base.size()}};
  if (!(p.fav >= kappa * p.total)) {
    throw PreconditionError(fmt::format("stage 1 favard hypothesis: Fav(E) = {} is below kappa H(E) = {}", p.fav,
                                        kappa * p.total));
  }
  return p;
}

struct Selection {
  TriadicInterval j0;
  DirectionSet g;
  GoodDirectionSelection sel;
};

// J_0 is the first-generation triadic interval holding phi + 1/2, and G the
// cells at depth N below J_0 whose projections exceed kappa H(E) / 2.
Selection good_directions(const ParallelPart& p, const ExperimentConfig& cfg, double kappa, json& report) {
  return in_stage("2 good directions", [&] {
    Selection s;
    s.j0 = TriadicInterval::containing(wrap_angle(p.phi + 0.5), 1);
    const int depth = s.j0.level + cfg.depth_n;
    std::vector<TriadicInterval> cells{s.j0};
    for (int l = s.j0.level; l < depth; ++l) {
      std::vector<TriadicInterval> next;
      for (const auto& c : cells) {
        for (const auto& k : c.children()) next.push_back(k);
      }
      cells = std::move(next);
    }
    std::vector<double> proj(cells.size());
    parallel_for(cells.size(), cfg.workers,
                 [&](std::size_t i) { proj[i] = project_segments(p.e, cells[i].center()).measure(); });
    const double threshold = 0.5 * kappa * p.total;
    std::vector<TriadicInterval> good;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (proj[i] > threshold) good.push_back(cells[i]);
    }
    if (good.empty()) throw PreconditionError("no direction in J_0 has a projection above kappa H(E) / 2");
    s.g = merge_arcs(good);
    GoodDirectionParams gp;
    gp.kappa = 0.5 * kappa;
    gp.depth = depth;
    gp.workers = cfg.workers;
    s.sel = select_good_directions(p.e, p.base, s.j0, s.g, gp);
    if (s.sel.family.atoms.empty()) throw PreconditionError("no atom has a large family of good directions");
    double hg = 0.0;
    for (const auto& a : s.g) hg += a.length();
    report["good_directions"] = {{"j0", {{"level", s.j0.level}, {"index", s.j0.index}}},
                                 {"g_length", hg},
                                 {"g_arcs", s.g.size()},
                                 {"m", s.sel.m},
                                 {"family_atoms", s.sel.family.atoms.size()},
                                 {"mass_fraction", s.sel.mass_fraction},
                                 {"min_cover_ratio", s.sel.min_cover_ratio},
                                 {"energy_constant", s.sel.energy_constant},
                                 {"density_constant", s.sel.density_constant}};
    report["invariants"]["selection.mass"] = s.sel.mass_ok;
    report["invariants"]["selection.cover"] = s.sel.cover_ok;
    report["invariants"]["selection.witness"] = s.sel.witness_ok;
    return s;
  });
}

StageParams stage_params(const ExperimentConfig& cfg, double m) {
  StageParams sp;
  sp.a = cfg.ahlfors;
  sp.m = m;
  sp.c_eps = cfg.c_eps;
  sp.c_j = cfg.c_j;
  sp.depth_n = cfg.depth_n;
  sp.workers = cfg.workers;
  return sp;
}

json certificate_json(double theta0, const AngleInterval& cone, double lip,
                      const std::vector<std::pair<double, double>>& points) {
  json pts = json::array();
  for (const auto& [t, f] : points) pts.push_back({t, f});
  return {{"theta0", theta0},
          {"cone", {{"center", cone.center}, {"half_width", cone.half_width}}},
          {"lip", lip},
          {"points", pts}};
}

std::string ids_csv(const std::vector<std::size_t>& ids) {
  std::string s = "atom\n";
  for (std::size_t a : ids) s += fmt::format("{}\n", a);
  return s;
}

OpenSet projection_complement(const IntervalUnion1D& proj) {
  std::vector<std::pair<double, double>> parts;
  double left = -kInf;
  for (const auto& [a, b] : proj.parts) {
    parts.emplace_back(left, a);
    left = b;
  }
  parts.emplace_back(left, kInf);
  return OpenSet::from_intervals(parts);
}

}  // namespace

bool CommandOutput::invariants_ok() const {
  const auto it = report.find("invariants");
  if (it == report.end()) return true;
  return std::all_of(it->begin(), it->end(), [](const json& v) { return v.get<bool>(); });
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256: digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

CommandOutput run_compute(const ExperimentConfig& cfg, const std::string& input, std::uint64_t mc_needles) {
  auto out = begin("compute", cfg);
  const auto in = load_input(input);
  out.report["inputs"].push_back(input_entry(in));
  const auto& e = in.segments;
  const auto profile = projection_profile(e, cfg.n_angles, cfg.workers);
  std::vector<double> m;
  std::string csv = "theta,measure\n";
  for (const auto& [theta, v] : profile) {
    m.push_back(v);
    csv += num(theta) + "," + num(v) + "\n";
  }
  const double fav = pairwise_sum(m.data(), m.size()) / static_cast<double>(cfg.n_angles);
  out.report["favard"] = fav;
  out.report["length"] = e.total_length();
  out.report["segments"] = e.size();
  out.report["n_angles"] = cfg.n_angles;
  out.files.emplace_back("profile.csv", csv);
  if (mc_needles > 0) {
    const auto mc = favard_mc(e, mc_needles, cfg.seed, cfg.workers);
    const double diff = std::abs(fav - mc.estimate);
    out.report["mc"] = {{"estimate", mc.estimate},
                        {"stderr", mc.stderr_},
                        {"needles", mc.needles},
                        {"hits", mc.hits},
                        {"z", mc.stderr_ > 0.0 ? diff / mc.stderr_ : 0.0}};
    out.report["invariants"]["mc_within_3_stderr"] = diff <= 3.0 * mc.stderr_;
  }
  return out;
}

CommandOutput run_mc(const ExperimentConfig& cfg, const std::string& input, std::uint64_t needles) {
  auto out = run_compute(cfg, input, needles > 0 ? needles : 1000000);
  out.command = "mc";
  out.report["command"] = "mc";
  return out;
}

CommandOutput run_cantor_decay(const ExperimentConfig& cfg, int n_max) {
  auto out = begin("cantor-decay", cfg);
  if (n_max < 0) throw PreconditionError("cantor-decay: n_max must be nonnegative");
  if (n_max > 6) throw ResourceError(fmt::format("cantor-decay: n_max = {} exceeds 6 (4^n cells)", n_max));
  std::string csv = "n,cells,favard,n_favard,n_sixth_favard\n";
  json rows = json::array();
  std::vector<double> values;
  for (int n = 0; n <= n_max; ++n) {
    const auto k = four_corners(n);
    const double fav = favard_length(skeleton(k), cfg.n_angles, cfg.workers);
    values.push_back(fav);
    const double nf = n * fav;
    const double n6 = std::pow(static_cast<double>(n), 1.0 / 6.0) * fav;
    rows.push_back({{"n", n}, {"cells", k.cells.size()}, {"favard", fav}, {"n_favard", nf}, {"n_sixth_favard", n6}});
    csv += fmt::format("{},{},{},{},{}\n", n, k.cells.size(), num(fav), num(nf), num(n6));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) decreasing = decreasing && values[i] < values[i - 1];
  out.report["rows"] = rows;
  out.report["invariants"]["strictly_decreasing"] = decreasing;
  out.files.emplace_back("cantor_decay.csv", csv);
  return out;
}

CommandOutput run_pipeline(const ExperimentConfig& cfg, const std::string& input, double kappa) {
  auto out = begin("pipeline", cfg);
  auto& rep = out.report;
  const auto in = load_input(input);
  rep["inputs"].push_back(input_entry(in));
  const auto part = parallel_part(in, cfg, kappa, rep);
  const auto s = good_directions(part, cfg, kappa, rep);
  const auto& sel = s.sel;
  const DiscreteMeasure mu = quarter_turn(sel.mu);

  const auto prop = in_stage("3 propagation", [&] {
    return propagate_good_directions(mu, sel.family.atoms, sel.family.intervals, sel.family.witnesses, s.j0,
                                     stage_params(cfg, sel.m));
  });
  double mass_e_prime = 0.0;
  for (std::size_t a : sel.family.atoms) mass_e_prime += mu.weights[a];
  double mass_fin = 0.0;
  for (std::size_t a : prop.fin) mass_fin += mu.weights[a];
  std::string trace_csv = "round,hg_integral,mass_fin,energy_ratio,growth_constant,e0_size\n";
  for (const auto& r : prop.trace) {
    trace_csv += fmt::format("{},{},{},{},{},{}\n", r.round, num(r.hg_integral), num(r.mass_fin), num(r.energy_ratio),
                             num(r.growth_constant), r.e0_size);
  }
  out.files.emplace_back("propagation.csv", trace_csv);
  rep["propagation"] = {{"rounds", prop.trace.size()},
                        {"cap", prop.cap},
                        {"tau", prop.tau},
                        {"mass_fin", mass_fin},
                        {"mass_e_prime", mass_e_prime},
                        {"j0_ratio", prop.j0_ratio},
                        {"final_energy_ratio", prop.final_energy_ratio},
                        {"chebyshev_ok", prop.first.chebyshev_ok},
                        {"e0", prop.first.e0},
                        {"e2", prop.first.e2}};
  rep["invariants"]["propagation.quarter_mass"] = mass_fin >= 0.25 * mass_e_prime * (1.0 - 1e-12);
  rep["invariants"]["propagation.round_cap"] = static_cast<int>(prop.trace.size()) <= prop.cap;

  const AngleInterval j{s.j0.center(), 0.5 * std::min(cfg.c_j, s.j0.length())};
  const int m0 = in_stage("4 bad-scale bound", [&] {
    if (prop.fin.empty()) throw InvariantError("E_Fin is empty");
    const auto counts = bad_counts(mu, prop.fin, j, cfg.workers);
    return *std::max_element(counts.begin(), counts.end());
  });
  rep["bad_scales"] = {{"j_center", j.center}, {"j_length", j.length()}, {"m0", m0}};

  const auto ex = in_stage("5 graph extraction", [&] { return extract_graph(mu, prop.fin, j, m0, cfg.c_j, cfg.workers); });
  const AngleInterval cone{wrap_angle(ex.certificate.cone.center + 0.25), ex.certificate.cone.half_width};
  const double theta0 = wrap_angle(ex.certificate.theta0 + 0.25);
  std::vector<Point> pts;
  std::vector<std::pair<double, double>> graph;
  for (std::size_t a : ex.certificate.atoms) {
    const Point p = sel.mu.points[a];
    pts.push_back(p);
    graph.emplace_back(project(theta0, p), project_perp(theta0, p));
  }
  std::sort(graph.begin(), graph.end());
  const auto recheck = verify_lipschitz(pts, cone, cfg.workers);
  std::vector<double> stage_sizes;
  for (const auto& st : ex.stages) stage_sizes.push_back(static_cast<double>(st.size()));
  const double total_mass = mu.total_mass();
  rep["extraction"] = {{"atoms", ex.certificate.atoms.size()},
                       {"mass", ex.mass},
                       {"mass_fraction", ex.mass / total_mass},
                       {"lip", recheck.lip},
                       {"lip_constant", ex.lip_constant},
                       {"halvings", ex.stages.size()},
                       {"stage_sizes", stage_sizes}};
  rep["certificate"] = certificate_json(theta0, cone, recheck.lip, graph);
  rep["invariants"]["extraction.cone_test"] = ex.check.is_graph;
  rep["invariants"]["extraction.recheck_in_input_frame"] = recheck.is_graph;
  rep["invariants"]["extraction.nonempty"] = !ex.certificate.atoms.empty();
  rep["invariants"]["extraction.positive_mass"] = ex.mass > 0.0;
  out.files.emplace_back("certificate.json", rep["certificate"].dump(2));
  out.files.emplace_back("certificate_atoms.csv", ids_csv(ex.certificate.atoms));
  return out;
}

CommandOutput run_content(const ExperimentConfig& cfg, const std::string& input, double delta,
                          const std::string& curve) {
  auto out = begin("content", cfg);
  if (!(delta > 0.0)) throw PreconditionError("content: delta must be positive");
  const auto in = load_input(input);
  out.report["inputs"].push_back(input_entry(in));
  const std::string curve_text = read_file(curve);
  out.report["inputs"].push_back(input_entry(curve, sha256_hex(curve_text), curve_text.size()));
  const auto gamma = read_polyline_csv(curve);
  double near = 0.0;
  double along = 0.0;
  if (in.squares) {
    near = hausdorff_content(pieces_near_polyline(in.cells, gamma, 3.0 * delta), 0.0);
    const auto on_curve = clip_to_cells(gamma, neighborhood(in.cells, delta));
    along = on_curve.empty() ? 0.0 : hausdorff_content(on_curve, 0.0);
  } else {
    const double piece = std::min(pitch_for(cfg, in.segments), 0.25 * delta);
    near = hausdorff_content(pieces_near_polyline(in.segments, gamma, 3.0 * delta, piece), 0.0);
    const auto on_curve = clip_to_cells(gamma, neighborhood(in.segments, delta));
    along = on_curve.empty() ? 0.0 : hausdorff_content(on_curve, 0.0);
  }
  out.report["delta"] = delta;
  out.report["content_e_near_curve"] = near;
  out.report["content_curve_in_neighbourhood"] = along;
  if (near == 0.0 && along == 0.0) {
    out.report["ratio"] = "empty";
  } else {
    out.report["ratio"] = number_or_label(along > 0.0 ? near / along : kInf, "unbounded");
  }
  out.files.emplace_back("content.csv", fmt::format("delta,near,along\n{},{},{}\n", num(delta), num(near), num(along)));
  return out;
}

CommandOutput run_lattice_check(const ExperimentConfig& cfg, const std::string& input) {
  auto out = begin("lattice-check", cfg);
  const auto in = load_input(input);
  out.report["inputs"].push_back(input_entry(in));
  const auto mu = discretize(in.segments, pitch_for(cfg, in.segments));
  const double rho = cfg.rho;
  constexpr int kScales = 2;
  constexpr int kDepth = 2;
  const int m_lo = side_level(1.0 / 3.0, 0, rho);
  const int m_hi = side_level(1.0 / 27.0, kScales + kDepth, rho);
  const auto lattice = BaseLattice::net(mu.points, rho, m_lo, m_hi);
  std::vector<std::size_t> all(mu.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  std::mt19937_64 rng(cfg.seed);
  std::string csv = "j_level,j_index,k,l,p_atoms,cubes,ok,max_outer_ratio,min_inner_ratio\n";
  std::size_t instances = 0;
  std::size_t passed = 0;
  for (int level : {1, 3}) {
    std::uniform_int_distribution<std::int64_t> pick_j(0, static_cast<std::int64_t>(std::pow(3, level)) - 1);
    for (int trial = 0; trial < 3; ++trial) {
      const TriadicInterval J{level, pick_j(rng)};
      for (int k = 0; k <= kScales; ++k) {
        const auto top = descend(lattice, all, J, k, 0);
        std::uniform_int_distribution<std::size_t> pick_p(0, top.size() - 1);
        const auto& p = top[pick_p(rng)].atoms;
        for (int l = 0; l <= kDepth; ++l) {
          const auto cubes = descend(lattice, p, J, k, l);
          const auto r = check_descend(lattice, p, cubes, J, k + l);
          ++instances;
          passed += r.ok() ? 1 : 0;
          csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", J.level, J.index, k, l, p.size(), cubes.size(), r.ok(),
                             num(r.max_outer_ratio), num(r.min_inner_ratio));
        }
      }
    }
  }
  out.files.emplace_back("lattice_check.csv", csv);
  out.report["lattice"] = {{"atoms", mu.size()}, {"m_lo", m_lo}, {"m_hi", m_hi}, {"instances", instances},
                           {"passed", passed}};
  out.report["invariants"]["lattice.descend"] = passed == instances;

  std::size_t whitney_ok = 0;
  constexpr int kDirections = 8;
  const double window = 2.0 * in.segments.bbox().diagonal() + 1.0;
  const double min_len = pitch_for(cfg, in.segments) / 4.0;
  std::string wcsv = "theta,intervals,ok\n";
  for (int i = 0; i < kDirections; ++i) {
    const double theta = (i + 0.5) / kDirections;
    const auto w = whitney(projection_complement(project_segments(in.segments, theta)), min_len, window);
    const bool ok = check_whitney(w).ok();
    whitney_ok += ok ? 1 : 0;
    wcsv += fmt::format("{},{},{}\n", num(theta), w.intervals.size(), ok);
  }
  out.files.emplace_back("whitney_check.csv", wcsv);
  out.report["whitney"] = {{"directions", kDirections}, {"passed", whitney_ok}};
  out.report["invariants"]["whitney.projection_gaps"] = whitney_ok == kDirections;
  return out;
}

CommandOutput run_tree_check(const ExperimentConfig& cfg, const std::string& input, double kappa) {
  auto out = begin("tree-check", cfg);
  auto& rep = out.report;
  const auto in = load_input(input);
  rep["inputs"].push_back(input_entry(in));
  const auto part = parallel_part(in, cfg, kappa, rep);
  const auto s = good_directions(part, cfg, kappa, rep);
  const DiscreteMeasure mu = quarter_turn(s.sel.mu);
  auto st = in_stage("3 stages", [&] {
    auto g = build_good_stages(mu, s.sel.family.atoms, s.sel.family.intervals, s.j0, stage_params(cfg, s.sel.m));
    build_gstar(mu, g);
    return g;
  });
  rep["stages"] = {{"e0", st.e0},
                   {"e1", st.e1},
                   {"e2", st.e2},
                   {"e0_points", st.e0_count()},
                   {"truncated", st.truncated},
                   {"growth_constant", number_or_label(st.growth_constant, "none")},
                   {"energy_ratio", st.energy_ratio}};
  rep["invariants"]["stages.chebyshev"] = st.chebyshev_ok;
  rep["invariants"]["stages.g0"] = st.g0_ok;
  rep["invariants"]["stages.g2"] = st.g2_ok;
  rep["invariants"]["stages.assertion1"] = st.assertion1_ok;

  auto ti = tree_input(mu, st, cfg.rho, cfg.k_max);
  ti.workers = cfg.workers;
  const auto tree = in_stage("4 tree", [&] { return build_tree(ti); });
  const auto tr = check_tree(tree);
  json checks = json::array();
  std::string csv = "check,ok,violations,constant,detail\n";
  for (const auto& c : tr.checks) {
    checks.push_back({{"name", c.name}, {"ok", c.ok}, {"violations", c.violations},
                      {"constant", number_or_label(c.constant, "inf")}, {"detail", c.detail}});
    rep["invariants"]["tree." + c.name] = c.ok;
    csv += fmt::format("{},{},{},{},\"{}\"\n", c.name, c.ok, c.violations, num(c.constant), c.detail);
  }
  rep["tree"] = {{"nodes", tr.tree_nodes},
                 {"roots", tr.roots},
                 {"bad", tr.bad},
                 {"shattered", tr.shattered},
                 {"roots_sum", tr.packing.roots_sum},
                 {"bad_sum", tr.packing.bad_sum},
                 {"packing_bound", tr.packing.bound},
                 {"checks", checks}};
  rep["invariants"]["tree.roots_packing"] = tr.packing.roots_ok;
  out.files.emplace_back("tree_checks.csv", csv);
  return out;
}

CommandOutput run_extract_graph(const ExperimentConfig& cfg, const std::string& input, double theta, double width,
                                int m0) {
  auto out = begin("extract-graph", cfg);
  const auto in = load_input(input);
  out.report["inputs"].push_back(input_entry(in));
  const auto mu = discretize(in.segments, pitch_for(cfg, in.segments));
  std::vector<std::size_t> f(mu.size());
  std::iota(f.begin(), f.end(), std::size_t{0});
  const AngleInterval j{wrap_angle(theta), 0.5 * (width > 0.0 ? width : cfg.c_j)};
  if (m0 < 0) {
    const auto counts = bad_counts(mu, f, j, cfg.workers);
    m0 = *std::max_element(counts.begin(), counts.end());
  }
  const auto ex = extract_graph(mu, f, j, m0, cfg.c_j, cfg.workers);
  const auto& c = ex.certificate;
  out.report["m0"] = m0;
  out.report["extraction"] = {{"atoms", c.atoms.size()},
                              {"input_atoms", mu.size()},
                              {"mass", ex.mass},
                              {"mass_fraction", ex.mass / mu.total_mass()},
                              {"lip_constant", ex.lip_constant},
                              {"halvings", ex.stages.size()}};
  out.report["certificate"] = certificate_json(c.theta0, c.cone, c.lip, c.points);
  out.report["invariants"]["extraction.cone_test"] = ex.check.is_graph;
  out.report["invariants"]["extraction.nonempty"] = !c.atoms.empty();
  out.files.emplace_back("certificate.json", out.report["certificate"].dump(2));
  out.files.emplace_back("certificate_atoms.csv", ids_csv(c.atoms));
  return out;
}

void write_outputs(const CommandOutput& out, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  auto put = [&](const std::string& name, const std::string& text) {
    const auto path = (fs::path(dir) / name).string();
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << text;
    if (!f) throw IoError("cannot write " + path);
  };
  json rep = out.report;
  rep["status"] = out.invariants_ok() ? "pass" : "invariant failure";
  put(out.command + ".json", rep.dump(2) + "\n");
  for (const auto& [name, text] : out.files) put(name, text);
}

int exit_code(const CommandOutput& out) { return out.invariants_ok() ? 0 : 2; }

}  // namespace favard::cli
