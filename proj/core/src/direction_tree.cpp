// SPDX-License-Identifier: MIT
#include "favard/direction_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "detail/hash_grid.hpp"
#include "favard/errors.hpp"
#include "favard/exact_sum.hpp"
#include "favard/parallel.hpp"

namespace favard {

namespace {

using detail::HashGrid;

std::string describe(const TriadicInterval& I) {
  std::ostringstream s;
  s << "[" << I.index << "/3^" << I.level << ")";
  return s.str();
}

// I intersects J; for triadic intervals this means one contains the other.
bool meets(const TriadicInterval& a, const TriadicInterval& b) { return a.contains(b) || b.contains(a); }

bool family_meets(const TriadicFamily& f, const TriadicInterval& J) {
  return std::any_of(f.begin(), f.end(), [&](const TriadicInterval& I) { return meets(I, J); });
}

bool family_has(const TriadicFamily& f, const TriadicInterval& J) {
  return std::find(f.begin(), f.end(), J) != f.end();
}

// H(J cap union f) for a disjoint triadic family f.
double overlap(const TriadicInterval& J, const TriadicFamily& f) {
  double s = 0.0;
  for (const auto& I : f) {
    if (I.contains(J)) return J.length();
    if (J.contains(I)) s += I.length();
  }
  return s;
}

// Integer measure of J cap union f in units of 3^-unit_level.
double overlap_units(const TriadicInterval& J, const TriadicFamily& f, int unit_level) {
  double s = 0.0;
  for (const auto& I : f) {
    if (I.contains(J)) return std::pow(3.0, unit_level - J.level);
    if (J.contains(I)) s += std::pow(3.0, unit_level - I.level);
  }
  return s;
}

void validate_family(const TriadicFamily& f, const TriadicInterval& j0, std::size_t atom) {
  for (std::size_t a = 0; a < f.size(); ++a) {
    if (!j0.contains(f[a])) {
      std::ostringstream msg;
      msg << "family of atom " << atom << " has " << describe(f[a]) << " outside J_0";
      throw PreconditionError(msg.str());
    }
    for (std::size_t b = a + 1; b < f.size(); ++b) {
      if (!f[a].disjoint(f[b])) {
        std::ostringstream msg;
        msg << "family of atom " << atom << " is not disjoint";
        throw PreconditionError(msg.str());
      }
    }
  }
}

double family_length(const TriadicFamily& f) { return total_length(f); }

// Members of f contained in I.
TriadicFamily inside(const TriadicFamily& f, const TriadicInterval& I) {
  TriadicFamily out;
  for (const auto& K : f) {
    if (I.contains(K)) out.push_back(K);
  }
  return out;
}

double atom_mass(const DiscreteMeasure& mu, const std::vector<std::size_t>& ids) {
  FixedSum s;
  for (std::size_t i : ids) s.add(mu.weights[i]);
  return s.value();
}

bool is_j0(const TriadicFamily& f, const TriadicInterval& j0) {
  const auto c = coalesce(f);
  return c.size() == 1 && c[0] == j0;
}

}  // namespace

Point quarter_turn(Point p) { return {p.x2, -p.x1}; }
Point quarter_turn_back(Point p) { return {-p.x2, p.x1}; }

DiscreteMeasure quarter_turn(const DiscreteMeasure& mu) {
  DiscreteMeasure out = mu;
  for (auto& p : out.points) p = quarter_turn(p);
  return out;
}

std::size_t GoodStages::e0_count() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const PointStages& p) { return p.in_e0; }));
}

GoodStages build_good_stages(const DiscreteMeasure& mu, const std::vector<std::size_t>& e_prime,
                             const std::vector<TriadicFamily>& g, const TriadicInterval& j0,
                             const StageParams& params) {
  if (e_prime.empty()) throw PreconditionError("build_good_stages: E' is empty");
  if (g.size() != e_prime.size()) throw PreconditionError("build_good_stages: one family per point of E' is required");
  if (!(params.a >= 1.0) || !(params.m > 0.0) || !(params.c_eps > 0.0 && params.c_eps < 1.0)) {
    throw PreconditionError("build_good_stages: need A >= 1, M > 0 and 0 < c_eps < 1");
  }
  if (params.depth_n < 0) throw PreconditionError("build_good_stages: depth N must be nonnegative");
  GoodStages st;
  st.j0 = j0;
  st.params = params;
  st.eps = params.eps();
  st.points.resize(e_prime.size());
  for (std::size_t i = 0; i < e_prime.size(); ++i) {
    if (e_prime[i] >= mu.size()) throw PreconditionError("build_good_stages: atom index out of range");
    if (g[i].empty()) {
      std::ostringstream msg;
      msg << "build_good_stages: empty family at atom " << e_prime[i];
      throw PreconditionError(msg.str());
    }
    validate_family(g[i], j0, e_prime[i]);
    st.points[i].atom = e_prime[i];
    st.points[i].g = g[i];
    std::sort(st.points[i].g.begin(), st.points[i].g.end());
  }
  const double radius = params.energy_radius;
  parallel_for(st.points.size(), params.workers, [&](std::size_t i) {
    auto& p = st.points[i];
    p.energy = cone_energy(mu, mu.points[p.atom], merge_arcs(p.g), radius);
  });

  st.mass_e = mu.total_mass();
  FixedSum me;
  FixedSum weighted;
  for (const auto& p : st.points) {
    me.add(mu.weights[p.atom]);
    weighted.add(mu.weights[p.atom] * p.energy);
  }
  st.mass_e_prime = me.value();
  st.e0 = weighted.value() / st.mass_e_prime + 1.0;

  const double eps = st.eps;
  std::vector<char> g0_ok(st.points.size(), 1);
  std::vector<double> ratio(st.points.size(), kInf);
  std::vector<char> dropped(st.points.size(), 0);
  std::vector<char> low(st.points.size(), 0);
  parallel_for(st.points.size(), params.workers, [&](std::size_t i) {
    auto& p = st.points[i];
    p.in_e0 = p.energy <= 2.0 * st.e0;
    low[i] = p.in_e0 ? 1 : 0;
    if (!p.in_e0) return;
    int unit = j0.level;
    for (const auto& I : p.g) unit = std::max(unit, I.level);
    std::set<TriadicInterval> candidates;
    for (const auto& I : p.g) {
      for (int l = I.level; l >= j0.level; --l) candidates.insert(I.ancestor(l));
    }
    TriadicFamily good;
    for (const auto& I : candidates) {
      const double cov = overlap_units(I, p.g, unit);
      if (cov >= (1.0 - eps) * std::pow(3.0, unit - I.level)) good.push_back(I);
    }
    p.g0 = maximal_intervals(good);
    for (const auto& I : p.g) {
      const auto n = std::count_if(p.g0.begin(), p.g0.end(), [&](const TriadicInterval& K) { return K.contains(I); });
      if (n != 1) g0_ok[i] = 0;
    }
    for (const auto& K : p.g0) {
      if (inside(p.g, K).empty()) g0_ok[i] = 0;
    }
    const double hg0 = family_length(p.g0);
    TriadicFamily g1;
    for (const auto& I : p.g0) {
      const double e = cone_energy(mu, mu.points[p.atom], merge_arcs(inside(p.g, I)), radius);
      if (e <= 4.0 * I.length() / hg0 * st.e0) g1.push_back(I);
    }
    double g1g = 0.0;
    for (const auto& I : g1) g1g += overlap(I, p.g);
    ratio[i] = g1g / family_length(p.g);
    TriadicFamily g1n;
    for (const auto& I : g1) {
      if (I.level - j0.level <= params.depth_n) g1n.push_back(I);
    }
    if (family_length(g1n) < 0.5 * family_length(g1) || g1n.empty()) {
      dropped[i] = 1;
      p.in_e0 = false;
      return;
    }
    p.g1 = g1n;
    for (const auto& I : p.g1) p.g2.push_back(I.middle_child());
    p.in_e00 = p.g0.size() == 1 && p.g0[0] == j0;
  });

  st.g0_ok = std::all_of(g0_ok.begin(), g0_ok.end(), [](char c) { return c != 0; });
  st.g2_ok = true;
  FixedSum m0;
  FixedSum m_low;
  double min_g0 = kInf;
  for (std::size_t i = 0; i < st.points.size(); ++i) {
    const auto& p = st.points[i];
    st.truncated += dropped[i] ? 1 : 0;
    if (low[i]) m_low.add(mu.weights[p.atom]);
    if (ratio[i] < kInf) st.g1_ratio_min = std::min(st.g1_ratio_min, ratio[i]);
    if (!p.in_e0) continue;
    m0.add(mu.weights[p.atom]);
    min_g0 = std::min(min_g0, family_length(p.g0));
    for (const auto& J : p.g2) {
      const auto three = J.dilate(3.0);
      const TriadicInterval I = J.parent();
      if (!family_has(p.g1, I) || std::abs(three.lo() - I.lo()) > 1e-15 || std::abs(three.hi() - I.hi()) > 1e-15) {
        st.g2_ok = false;
      }
    }
  }
  st.mass_e0 = m0.value();
  st.chebyshev_ok = m_low.value() >= 0.5 * st.mass_e_prime;
  st.g1_large_ok = st.g1_ratio_min >= 1.0 / 3.0 || st.g1_ratio_min == kInf;
  st.e1 = std::max(min_g0 < kInf ? st.e0 / min_g0 : 0.0, params.m);
  st.e2 = params.a * st.e1;
  return st;
}

std::vector<TriadicFamily> build_gstar(const DiscreteMeasure& mu, GoodStages& st) {
  const TriadicInterval j0 = st.j0;
  std::vector<char> a1(st.points.size(), 1);
  parallel_for(st.points.size(), st.params.workers, [&](std::size_t i) {
    auto& p = st.points[i];
    if (!p.in_e0) {
      p.gstar = p.g;
    } else if (p.in_e00) {
      p.gstar = {j0};
    } else {
      TriadicFamily parents;
      for (const auto& I : p.g1) parents.push_back(I.parent());
      p.g11 = maximal_intervals(parents);
      TriadicFamily all = p.g;
      all.insert(all.end(), p.g11.begin(), p.g11.end());
      p.gstar = maximal_intervals(all);
    }
    p.fin = is_j0(p.gstar, j0);
    for (const auto& I : p.g) {
      if (std::none_of(p.gstar.begin(), p.gstar.end(), [&](const TriadicInterval& K) { return K.contains(I); })) a1[i] = 0;
    }
    for (const auto& K : p.gstar) {
      if (std::none_of(p.g.begin(), p.g.end(), [&](const TriadicInterval& I) { return K.contains(I); })) a1[i] = 0;
    }
    p.energy_star = cone_energy(mu, mu.points[p.atom], merge_arcs(p.gstar), st.params.energy_radius);
  });
  st.assertion1_ok = std::all_of(a1.begin(), a1.end(), [](char c) { return c != 0; });
  FixedSum fin;
  FixedSum hg;
  FixedSum hgs;
  FixedSum en;
  FixedSum ens;
  double tau = kInf;
  st.growth_constant = kInf;
  for (const auto& p : st.points) {
    const double w = mu.weights[p.atom];
    const double lg = family_length(p.g);
    const double ls = family_length(p.gstar);
    if (p.fin) fin.add(w);
    hg.add(w * lg);
    hgs.add(w * ls);
    en.add(w * p.energy);
    ens.add(w * p.energy_star);
    tau = std::min(tau, lg / j0.length());
    if (p.in_e0 && !p.fin) st.growth_constant = std::min(st.growth_constant, (ls / lg - 1.0) / st.eps);
  }
  st.mass_fin = fin.value();
  st.hg_integral = hg.value();
  st.hgstar_integral = hgs.value();
  st.fin_alternative = st.mass_fin >= st.mass_e_prime / 4.0;
  st.measure_constant = (st.hgstar_integral - st.hg_integral) / (tau * st.eps * st.mass_e_prime * j0.length());
  st.energy_ratio = ens.value() / (en.value() + j0.length() * st.mass_e);
  st.gstar_built = true;
  std::vector<TriadicFamily> out;
  out.reserve(st.points.size());
  for (const auto& p : st.points) out.push_back(p.gstar);
  return out;
}

PropagationResult propagate_good_directions(const DiscreteMeasure& mu, const std::vector<std::size_t>& e_prime,
                                            const std::vector<TriadicFamily>& g,
                                            const std::vector<std::vector<double>>& witnesses,
                                            const TriadicInterval& j0, const StageParams& params) {
  if (witnesses.size() != g.size()) throw PreconditionError("propagate: one witness list per family is required");
  PropagationResult res;
  res.tau = kInf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    validate_family(g[i], j0, i < e_prime.size() ? e_prime[i] : i);
    if (witnesses[i].size() != g[i].size()) {
      std::ostringstream msg;
      msg << "hypothesis (e): atom " << (i < e_prime.size() ? e_prime[i] : i) << " lacks a witness angle";
      throw PreconditionError(msg.str());
    }
    for (std::size_t a = 0; a < g[i].size(); ++a) {
      if (!g[i][a].contains(witnesses[i][a])) {
        std::ostringstream msg;
        msg << "hypothesis (e): witness " << witnesses[i][a] << " lies outside " << describe(g[i][a]);
        throw PreconditionError(msg.str());
      }
    }
    res.tau = std::min(res.tau, family_length(g[i]) / j0.length());
  }
  if (!(res.tau > 0.0)) throw PreconditionError("hypothesis (d): some family has zero length");
  res.delta = atom_mass(mu, e_prime) / mu.total_mass();
  res.j0_ratio = j0.length() * params.a * params.m / params.c_j;
  res.j0_small = res.j0_ratio <= 1.0;
  const double eps = params.eps();
  res.cap = static_cast<int>(std::ceil(12.0 / (eps * res.tau)));

  std::vector<TriadicFamily> fam = g;
  std::vector<std::vector<double>> wit = witnesses;
  for (int round = 1;; ++round) {
    if (round > res.cap) {
      std::ostringstream msg;
      msg << "propagation exceeded " << res.cap << " rounds; int H(G_k) trace:";
      for (const auto& r : res.trace) msg << " " << r.hg_integral;
      throw InvariantError(msg.str());
    }
    GoodStages st = build_good_stages(mu, e_prime, fam, j0, params);
    auto next = build_gstar(mu, st);
    PropagationRound r;
    r.round = round;
    r.hg_integral = st.hg_integral;
    r.mass_fin = st.mass_fin;
    r.energy_ratio = st.energy_ratio;
    r.growth_constant = st.growth_constant;
    r.e0_size = st.e0_count();
    res.trace.push_back(r);
    std::vector<std::vector<double>> next_wit(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
      for (const auto& K : next[i]) {
        const auto it = std::find_if(fam[i].begin(), fam[i].end(), [&](const TriadicInterval& I) { return K.contains(I); });
        if (it == fam[i].end()) throw InvariantError("propagation lost a witness");
        next_wit[i].push_back(wit[i][static_cast<std::size_t>(it - fam[i].begin())]);
      }
    }
    const bool done = st.fin_alternative;
    if (round == 1) res.first = st;
    if (!done && !(st.hgstar_integral > st.hg_integral)) {
      std::ostringstream msg;
      msg << "propagation stalled in round " << round << ": int H(G_*) = " << st.hgstar_integral
          << " does not exceed int H(G) = " << st.hg_integral;
      throw InvariantError(msg.str());
    }
    fam = std::move(next);
    wit = std::move(next_wit);
    if (done) {
      for (const auto& p : st.points) {
        if (p.fin) res.fin.push_back(p.atom);
      }
      break;
    }
  }
  res.families = fam;
  res.witnesses = wit;

  FixedSum num;
  std::vector<double> ef(res.fin.size());
  const DirectionSet whole{j0.as_interval()};
  parallel_for(res.fin.size(), params.workers, [&](std::size_t i) {
    ef[i] = mu.weights[res.fin[i]] * cone_energy(mu, mu.points[res.fin[i]], whole, params.energy_radius);
  });
  for (double v : ef) num.add(v);
  FixedSum base;
  for (std::size_t i = 0; i < e_prime.size(); ++i) {
    base.add(mu.weights[e_prime[i]] * res.first.points[i].energy);
  }
  res.final_energy_ratio = num.value() / (base.value() + j0.length() * mu.total_mass());
  return res;
}

TreeInput tree_input(const DiscreteMeasure& mu, const GoodStages& stages, double rho, int k_max) {
  TreeInput in;
  in.mu = mu;
  for (const auto& p : stages.points) {
    if (!p.in_e0) continue;
    in.e0.push_back(p.atom);
    in.g2.push_back(p.g2);
  }
  in.j0 = stages.j0;
  in.eps = stages.eps;
  in.rho = rho;
  in.k_max = k_max;
  in.depth_n = stages.params.depth_n;
  in.e2 = stages.e2;
  in.m = stages.params.m;
  in.workers = stages.params.workers;
  return in;
}

namespace {

// Lookup of the pairs (y, I) with y in E_0 and I in G_2(y), with the
// families G(x, k) cached per atom and generation.
class GoodIndex {
 public:
  explicit GoodIndex(const TreeInput& in) : in_(in) {
    e0_of_.assign(in.mu.size(), -1);
    for (std::size_t i = 0; i < in.e0.size(); ++i) e0_of_[in.e0[i]] = static_cast<long>(i);
  }

  long e0_index(std::size_t atom) const { return e0_of_[atom]; }

  const TriadicFamily& at(std::size_t atom, int k) {
    auto key = std::make_pair(atom, k);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, compute(in_.mu.points[atom], k)).first->second;
  }

  TriadicFamily compute(Point x, int k) {
    const double r = 10.0 * std::pow(in_.rho, k);
    TriadicFamily found;
    grid(k).near(x, [&](std::size_t e) {
      const Point y = in_.mu.points[in_.e0[e]];
      for (const auto& I : in_.g2[e]) {
        if (d_metric(I.as_interval(), x, y) <= r) found.push_back(I);
      }
    });
    return maximal_intervals(found);
  }

  // S1: some x in P cap E_0 has G_2(x) meeting J.
  bool s1(const std::vector<std::size_t>& atoms, const TriadicInterval& J) const {
    for (std::size_t a : atoms) {
      const long e = e0_of_[a];
      if (e >= 0 && family_meets(in_.g2[static_cast<std::size_t>(e)], J)) return true;
    }
    return false;
  }

  // S2': some x in P cap E_0 has J in G_2(x).
  bool s2_prime(const std::vector<std::size_t>& atoms, const TriadicInterval& J) const {
    for (std::size_t a : atoms) {
      const long e = e0_of_[a];
      if (e >= 0 && family_has(in_.g2[static_cast<std::size_t>(e)], J)) return true;
    }
    return false;
  }

  // int_P H(J cap G(x, k)) dmu(x) / (H(J) mu(P)).
  double s2_ratio(const std::vector<std::size_t>& atoms, const TriadicInterval& J, int k) {
    FixedSum lhs;
    FixedSum mass;
    for (std::size_t a : atoms) {
      const double w = in_.mu.weights[a];
      mass.add(w);
      lhs.add(w * overlap(J, at(a, k)) / J.length());
    }
    return mass.is_zero() ? 1.0 : lhs.value() / mass.value();
  }

 private:
  const HashGrid& grid(int k) {
    auto it = grids_.find(k);
    if (it != grids_.end()) return it->second;
    HashGrid g(10.0 * std::pow(in_.rho, k));
    for (std::size_t i = 0; i < in_.e0.size(); ++i) g.insert(in_.mu.points[in_.e0[i]], i);
    return grids_.emplace(k, std::move(g)).first->second;
  }

  const TreeInput& in_;
  std::vector<long> e0_of_;
  std::map<std::pair<std::size_t, int>, TriadicFamily> cache_;
  std::map<int, HashGrid> grids_;
};

}  // namespace

TriadicFamily good_at_scale(const TreeInput& in, Point x, int k) {
  GoodIndex idx(in);
  return idx.compute(x, k);
}

std::vector<std::size_t> TreeDecomposition::generation(int k) const {
  std::vector<std::size_t> out;
  for (std::size_t i : tree) {
    if (nodes[i].generation == k) out.push_back(i);
  }
  return out;
}

TreeDecomposition build_tree(const TreeInput& in) {
  if (in.e0.size() != in.g2.size()) throw PreconditionError("build_tree: one G_2 family per point of E_0 is required");
  if (in.k_max < 0 || in.depth_n < 0) throw PreconditionError("build_tree: k_max and N must be nonnegative");
  if (!(in.eps > 0.0 && in.eps < 1.0)) throw PreconditionError("build_tree: eps must lie in (0, 1)");
  for (std::size_t i = 0; i < in.e0.size(); ++i) {
    if (in.e0[i] >= in.mu.size()) throw PreconditionError("build_tree: E_0 atom out of range");
    validate_family(in.g2[i], in.j0, in.e0[i]);
    for (const auto& I : in.g2[i]) {
      if (I.level - in.j0.level > in.depth_n + 1) {
        std::ostringstream msg;
        msg << "build_tree: " << describe(I) << " of atom " << in.e0[i] << " is deeper than N + 1 levels below J_0";
        throw PreconditionError(msg.str());
      }
    }
  }
  TreeDecomposition t;
  t.input = in;
  if (in.e0.empty()) return t;
  const double h0 = in.j0.length();
  const int m_lo = side_level(h0, 0, in.rho);
  const int m_hi = side_level(h0 * std::pow(3.0, -(in.depth_n + 1)), in.k_max, in.rho);
  t.lattice = BaseLattice::net(in.mu.points, in.rho, m_lo, m_hi);
  GoodIndex idx(t.input);

  auto push = [&](AnisoCube c, int gen, NodeTag tag, int round, long parent) {
    TreeNode n;
    n.mass = atom_mass(in.mu, c.atoms);
    n.cube = std::move(c);
    n.generation = gen;
    n.tag = tag;
    n.round = round;
    n.parent = parent;
    t.nodes.push_back(std::move(n));
    return t.nodes.size() - 1;
  };

  std::vector<std::size_t> all(in.mu.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<std::size_t> current;
  for (auto& c : descend(t.lattice, all, in.j0, 0, 0)) {
    const bool meets_e0 = std::any_of(c.atoms.begin(), c.atoms.end(), [&](std::size_t a) { return idx.e0_index(a) >= 0; });
    if (!meets_e0) continue;
    const auto id = push(std::move(c), 0, NodeTag::Good, 0, -1);
    t.nodes[id].root = true;
    current.push_back(id);
  }

  for (int k = 0; k < in.k_max; ++k) {
    std::vector<std::size_t> next;
    for (std::size_t q : current) {
      const AnisoCube parent_cube = t.nodes[q].cube;
      std::vector<std::size_t> sh;
      for (auto& c : children(t.lattice, parent_cube)) {
        const TriadicInterval J = c.interval;
        if (!idx.s1(c.atoms, J)) {
          push(std::move(c), k + 1, NodeTag::End, 0, static_cast<long>(q));
        } else if (idx.s2_ratio(c.atoms, J, k + 1) >= 1.0 - in.eps) {
          next.push_back(push(std::move(c), k + 1, NodeTag::Good, 0, static_cast<long>(q)));
        } else {
          sh.push_back(push(std::move(c), k + 1, NodeTag::Sh, 0, static_cast<long>(q)));
        }
      }
      for (int j = 0; !sh.empty(); ++j) {
        std::vector<std::size_t> sh_next;
        for (std::size_t s : sh) {
          const AnisoCube sc = t.nodes[s].cube;
          if (sc.interval.level - in.j0.level >= in.depth_n + 1) {
            std::ostringstream msg;
            msg << "shattering below depth N + 1 at generation " << k + 1 << ", round " << j + 1 << ", interval "
                << describe(sc.interval) << ", cube of " << sc.atoms.size() << " atoms centred at atom " << sc.center;
            throw InvariantError(msg.str());
          }
          for (const auto& J : sc.interval.children()) {
            for (auto& c : shatter(t.lattice, sc, J)) {
              if (!idx.s1(c.atoms, J)) {
                push(std::move(c), k + 1, NodeTag::End, j + 1, static_cast<long>(q));
              } else if (idx.s2_prime(c.atoms, J)) {
                const auto id = push(std::move(c), k + 1, NodeTag::Good, j + 1, static_cast<long>(q));
                t.nodes[id].root = true;
                next.push_back(id);
              } else {
                sh_next.push_back(push(std::move(c), k + 1, NodeTag::Sh, j + 1, static_cast<long>(q)));
              }
            }
          }
        }
        t.max_round = std::max(t.max_round, j + 1);
        sh = std::move(sh_next);
      }
    }
    current = std::move(next);
  }
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (t.nodes[i].tag != NodeTag::Good) continue;
    t.tree.push_back(i);
    if (t.nodes[i].root) t.roots.push_back(i);
  }
  return t;
}

namespace {

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool has_atom(const AnisoCube& c, std::size_t a) { return std::binary_search(c.atoms.begin(), c.atoms.end(), a); }

bool disjoint_atoms(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return true;
}

// Q precedes P: Q subset P, J_Q subset J_P and gen(Q) >= gen(P).
bool precedes(const TreeNode& q, const TreeNode& p) {
  return q.generation >= p.generation && p.cube.interval.contains(q.cube.interval) && subset(q.cube.atoms, p.cube.atoms);
}

std::size_t root_of(const TreeDecomposition& t, std::size_t i) {
  while (!t.nodes[i].root) i = static_cast<std::size_t>(t.nodes[i].parent);
  return i;
}

// atom -> tree node indices containing it.
std::vector<std::vector<std::size_t>> atom_nodes(const TreeDecomposition& t) {
  std::vector<std::vector<std::size_t>> out(t.input.mu.size());
  for (std::size_t i : t.tree) {
    for (std::size_t a : t.nodes[i].cube.atoms) out[a].push_back(i);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> collect_bad_cubes(const TreeDecomposition& t) {
  const auto& mu = t.input.mu;
  const double rho = t.input.rho;
  std::map<int, HashGrid> grids;
  for (int k = 0; k <= t.input.k_max; ++k) {
    HashGrid g(std::pow(rho, k));
    for (std::size_t i = 0; i < mu.size(); ++i) g.insert(mu.points[i], i);
    grids.emplace(k, std::move(g));
  }
  std::vector<char> bad(t.tree.size(), 0);
  parallel_for(t.tree.size(), t.input.workers, [&](std::size_t n) {
    const TreeNode& q = t.nodes[t.tree[n]];
    const int k = q.generation;
    const double outer = std::pow(rho, k);
    const double inner = rho * outer;
    const AngleInterval wide = q.cube.interval.dilate(15.0);
    const HashGrid& g = grids.at(k);
    for (std::size_t a : q.cube.atoms) {
      const Point x = mu.points[a];
      bool found = false;
      g.near(x, [&](std::size_t y) {
        if (!found && cone_contains(x, wide, inner, outer, mu.points[y])) found = true;
      });
      if (found) {
        bad[n] = 1;
        return;
      }
    }
  });
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < t.tree.size(); ++n) {
    if (bad[n]) out.push_back(t.tree[n]);
  }
  return out;
}

PackingSums packing_sums(const TreeDecomposition& t, const std::vector<std::size_t>& bad) {
  PackingSums s;
  FixedSum roots;
  for (std::size_t r : t.roots) roots.add(t.nodes[r].cube.interval.length() * t.nodes[r].mass);
  s.roots_sum = roots.value();
  FixedSum b;
  std::unordered_map<std::size_t, FixedSum> per_root;
  for (std::size_t q : bad) {
    b.add(t.nodes[q].cube.interval.length() * t.nodes[q].mass);
    per_root[root_of(t, q)].add(t.nodes[q].mass);
  }
  s.bad_sum = b.value();
  for (std::size_t r : t.roots) {
    auto it = per_root.find(r);
    s.per_root_bad.push_back(it == per_root.end() ? 0.0 : it->second.value());
  }
  s.bound = t.input.j0.length() * t.input.mu.total_mass() / t.input.eps;
  s.roots_ok = s.roots_sum <= s.bound;
  return s;
}

bool TreeReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.ok; });
}

const PropertyCheck& TreeReport::get(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw PreconditionError("no tree check named " + name);
}

TreeReport check_tree(const TreeDecomposition& t) {
  TreeReport rep;
  const TreeInput& in = t.input;
  const auto& mu = in.mu;
  const double rho = in.rho;
  const int workers = in.workers;
  rep.tree_nodes = t.tree.size();
  rep.roots = t.roots.size();
  rep.shattered = static_cast<std::size_t>(
      std::count_if(t.nodes.begin(), t.nodes.end(), [](const TreeNode& n) { return n.tag == NodeTag::Sh; }));
  const auto by_atom = atom_nodes(t);
  const std::size_t nt = t.tree.size();

  {
    PropertyCheck c{"T1", true, 0, 0.0, "inner Euclidean ball and outer d_J ball"};
    std::map<std::pair<int, int>, HashGrid> grids;
    for (std::size_t i : t.tree) {
      const auto& q = t.nodes[i];
      const auto key = std::make_pair(q.generation, q.cube.interval.level);
      if (grids.count(key)) continue;
      HashGrid g(q.cube.interval.length() * std::pow(rho, q.generation + 3));
      for (std::size_t a = 0; a < mu.size(); ++a) g.insert(mu.points[a], a);
      grids.emplace(key, std::move(g));
    }
    std::vector<std::size_t> viol(nt, 0);
    std::vector<double> ratio(nt, 0.0);
    parallel_for(nt, workers, [&](std::size_t n) {
      const auto& q = t.nodes[t.tree[n]];
      const Point xq = mu.points[q.cube.center];
      const AngleInterval J = q.cube.interval.as_interval();
      const double outer = 4.0 * std::pow(rho, q.generation);
      for (std::size_t a : q.cube.atoms) {
        const double d = d_metric(J, mu.points[a], xq);
        ratio[n] = std::max(ratio[n], d / std::pow(rho, q.generation));
        if (d > outer) ++viol[n];
      }
      if (!has_atom(q.cube, q.cube.center)) ++viol[n];
      const double r = q.cube.interval.length() * std::pow(rho, q.generation + 3);
      grids.at({q.generation, q.cube.interval.level}).near(xq, [&](std::size_t a) {
        if (distance(mu.points[a], xq) <= r && !has_atom(q.cube, a)) ++viol[n];
      });
    });
    for (std::size_t n = 0; n < nt; ++n) {
      c.violations += viol[n];
      c.constant = std::max(c.constant, ratio[n]);
    }
    c.ok = c.violations == 0;
    rep.checks.push_back(c);
  }

  {
    PropertyCheck c{"T2", true, 0, 1.0, "S1 and the S2 integral for generations k >= 1"};
    GoodIndex idx(in);
    for (std::size_t i : t.tree) {
      const auto& q = t.nodes[i];
      if (q.generation == 0) continue;
      const double r = idx.s2_ratio(q.cube.atoms, q.cube.interval, q.generation);
      c.constant = std::min(c.constant, r);
      if (!idx.s1(q.cube.atoms, q.cube.interval) || r < 1.0 - in.eps) ++c.violations;
    }
    c.ok = c.violations == 0;
    rep.checks.push_back(c);
  }

  {
    PropertyCheck c{"T3", true, 0, 0.0, "unique ancestor in every lower generation"};
    std::vector<std::size_t> viol(nt, 0);
    parallel_for(nt, workers, [&](std::size_t n) {
      const auto& q = t.nodes[t.tree[n]];
      std::vector<int> count(static_cast<std::size_t>(q.generation + 1), 0);
      for (std::size_t p : by_atom[q.cube.atoms.front()]) {
        const auto& pn = t.nodes[p];
        if (pn.generation > q.generation) continue;
        if (pn.cube.interval.contains(q.cube.interval) && subset(q.cube.atoms, pn.cube.atoms)) {
          ++count[static_cast<std::size_t>(pn.generation)];
        }
      }
      for (int v : count) {
        if (v != 1) ++viol[n];
      }
    });
    for (auto v : viol) c.violations += v;
    c.ok = c.violations == 0;
    rep.checks.push_back(c);
  }

  {
    PropertyCheck c{"T4", true, 0, 0.0, "nested or disjoint in one factor"};
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& list : by_atom) {
      for (std::size_t a = 0; a < list.size(); ++a) {
        for (std::size_t b = 0; b < list.size(); ++b) {
          if (a == b) continue;
          const auto& q = t.nodes[list[a]];
          const auto& p = t.nodes[list[b]];
          if (q.generation < p.generation) continue;
          if (q.generation == p.generation && list[a] > list[b]) continue;
          if (!meets(q.cube.interval, p.cube.interval)) continue;
          seen.insert({list[a], list[b]});
        }
      }
    }
    for (auto [qa, pb] : seen) {
      const auto& q = t.nodes[qa];
      const auto& p = t.nodes[pb];
      const bool ok = q.generation > p.generation ? precedes(q, p) : false;
      if (!ok) ++c.violations;
    }
    c.constant = static_cast<double>(seen.size());
    c.ok = c.violations == 0;
    rep.checks.push_back(c);
  }

  const auto bad = collect_bad_cubes(t);
  rep.bad = bad.size();
  rep.packing = packing_sums(t, bad);
  {
    PropertyCheck c{"T5", rep.packing.roots_ok, rep.packing.roots_ok ? 0u : 1u,
                    rep.packing.roots_sum / (in.j0.length() * mu.total_mass()), "roots packing sum / (H(J_0) mu(E))"};
    rep.checks.push_back(c);
  }

  {
    PropertyCheck c{"T6", true, 0, 0.0, "each node lies in exactly one T(R)"};
    for (std::size_t i : t.tree) {
      const auto& q = t.nodes[i];
      std::size_t n = 0;
      for (std::size_t r : t.roots) {
        const auto& rn = t.nodes[r];
        if (rn.cube.interval == q.cube.interval && precedes(q, rn)) ++n;
      }
      if (n != 1 || t.nodes[root_of(t, i)].cube.interval != q.cube.interval) ++c.violations;
    }
    c.ok = c.violations == 0;
    rep.checks.push_back(c);
  }

  {
    PropertyCheck c{"T7", true, 0, 0.0, "unique cube per (x, J in G_2(x), k)"};
    for (std::size_t e = 0; e < in.e0.size(); ++e) {
      const std::size_t x = in.e0[e];
      for (const auto& J : in.g2[e]) {
        std::vector<int> count(static_cast<std::size_t>(in.k_max + 1), 0);
        for (std::size_t i : by_atom[x]) {
          const auto& q = t.nodes[i];
          if (q.cube.interval.contains(J)) ++count[static_cast<std::size_t>(q.generation)];
        }
        for (int v : count) {
          if (v != 1) ++c.violations;
        }
      }
    }
    c.ok = c.violations == 0;
    rep.checks.push_back(c);
  }

  {
    PropertyCheck c{"T8", true, 0, 0.0, "max #Bad(x, 0.8 J_Q, 0, k) / E_2"};
    std::map<std::pair<std::size_t, std::pair<int, std::int64_t>>, std::vector<int>> cache;
    std::vector<std::pair<std::size_t, TriadicInterval>> keys;
    for (std::size_t i : t.tree) {
      const auto& q = t.nodes[i];
      for (std::size_t a : q.cube.atoms) {
        auto key = std::make_pair(a, std::make_pair(q.cube.interval.level, q.cube.interval.index));
        if (cache.emplace(key, std::vector<int>{}).second) keys.emplace_back(a, q.cube.interval);
      }
    }
    std::vector<std::vector<int>> scales(keys.size());
    parallel_for(keys.size(), workers, [&](std::size_t n) {
      const auto [a, J] = keys[n];
      scales[n] = bad_scales(mu.points, mu.points[a], J.dilate(0.8), rho, 0, in.k_max).scales;
    });
    for (std::size_t n = 0; n < keys.size(); ++n) {
      cache[{keys[n].first, {keys[n].second.level, keys[n].second.index}}] = std::move(scales[n]);
    }
    double worst = 0.0;
    for (std::size_t i : t.tree) {
      const auto& q = t.nodes[i];
      for (std::size_t a : q.cube.atoms) {
        const auto& s = cache.at({a, {q.cube.interval.level, q.cube.interval.index}});
        const auto count = std::count_if(s.begin(), s.end(), [&](int k) { return k <= q.generation; });
        worst = std::max(worst, static_cast<double>(count));
      }
    }
    c.constant = worst / in.e2;
    c.ok = c.constant <= 1.0;
    c.violations = c.ok ? 0 : 1;
    rep.checks.push_back(c);
  }

  {
    PropertyCheck c{"children", true, 0, 0.0, "tree children nest in and tile disjointly the parent product"};
    std::unordered_map<long, std::vector<std::size_t>> kids;
    for (std::size_t i : t.tree) {
      if (t.nodes[i].parent >= 0) kids[t.nodes[i].parent].push_back(i);
    }
    for (const auto& [p, list] : kids) {
      const auto& pn = t.nodes[static_cast<std::size_t>(p)];
      for (std::size_t a = 0; a < list.size(); ++a) {
        const auto& qa = t.nodes[list[a]];
        if (!pn.cube.interval.contains(qa.cube.interval) || !subset(qa.cube.atoms, pn.cube.atoms)) ++c.violations;
        for (std::size_t b = a + 1; b < list.size(); ++b) {
          const auto& qb = t.nodes[list[b]];
          if (meets(qa.cube.interval, qb.cube.interval) && !disjoint_atoms(qa.cube.atoms, qb.cube.atoms)) ++c.violations;
        }
      }
    }
    c.ok = c.violations == 0;
    rep.checks.push_back(c);
  }

  {
    PropertyCheck c{"energy_to_bad", true, 0, 0.0, "truncated 15J energies / (M sum of H(J_Q) over Bad cubes at x)"};
    std::vector<double> bad_h(mu.size(), 0.0);
    for (std::size_t q : bad) {
      for (std::size_t a : t.nodes[q].cube.atoms) bad_h[a] += t.nodes[q].cube.interval.length();
    }
    std::vector<double> ratio(in.e0.size(), 0.0);
    std::vector<char> viol(in.e0.size(), 0);
    parallel_for(in.e0.size(), workers, [&](std::size_t e) {
      const std::size_t x = in.e0[e];
      double lhs = 0.0;
      for (const auto& J : in.g2[e]) {
        lhs += energy_integral(mu, mu.points[x], {J.dilate(15.0)}, rho, 0, in.k_max);
      }
      if (lhs == 0.0) return;
      if (bad_h[x] == 0.0) {
        viol[e] = 1;
        return;
      }
      ratio[e] = lhs / (in.m * bad_h[x]);
    });
    for (std::size_t e = 0; e < in.e0.size(); ++e) {
      c.violations += viol[e];
      c.constant = std::max(c.constant, ratio[e]);
    }
    c.ok = c.violations == 0;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace favard
