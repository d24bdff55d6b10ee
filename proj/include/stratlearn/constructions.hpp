#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "stratlearn/common.hpp"
#include "stratlearn/finite.hpp"
#include "stratlearn/seminorm.hpp"
#include "stratlearn/strategic.hpp"

namespace stratlearn {

// ---------------------------------------------------------------------------
// Point-classifier space over [n] + powerset([n]) with the integer metric
// cost table. Feature ids: 0..n-1 are the integers 1..n; n + k is the subset
// with bitmask k. R = {+-1, ..., +-n}.

struct Prop3Space {
  int n = 0;
  FiniteStrategicSpace space;
  std::vector<int> integer_ids;   // ids of the integer features
  std::vector<int> subset_ids;    // ids of the subset features
};

inline Prop3Space build_prop3_space(int n) {
  if (n < 1 || n > 4) throw InvalidInput("build_prop3_space: n must be in 1..4");
  Prop3Space out;
  out.n = n;
  const int nsub = 1 << n;
  const int size = n + nsub;
  FiniteStrategicSpace& sp = out.space;
  sp.size = size;
  sp.cost.assign(static_cast<size_t>(size), Vec(static_cast<size_t>(size), 0.0));

  auto is_int = [&](int id) { return id < n; };
  auto value = [&](int id) { return static_cast<double>(id + 1); };  // integer i+1
  auto mask = [&](int id) { return id - n; };

  for (int a = 0; a < size; ++a) {
    for (int b = 0; b < size; ++b) {
      double c;
      if (a == b) {
        c = 0.0;
      } else if (is_int(a) && is_int(b)) {
        c = value(a) + value(b);
      } else if (is_int(a) && !is_int(b)) {
        bool member = (mask(b) >> a) & 1;
        c = member ? value(a) : value(a) + 1.0;
      } else if (!is_int(a) && is_int(b)) {
        bool member = (mask(a) >> b) & 1;
        c = member ? value(b) : value(b) + 1.0;
      } else {
        c = 1.0;
      }
      sp.cost[static_cast<size_t>(a)][static_cast<size_t>(b)] = c;
    }
  }
  // point classifiers: h_s labels only the subset-feature s positive
  for (int k = 0; k < nsub; ++k) {
    std::vector<int8_t> h(static_cast<size_t>(size), -1);
    h[static_cast<size_t>(n + k)] = 1;
    sp.family.push_back(std::move(h));
  }
  for (int i = 1; i <= n; ++i) {
    sp.preference_set.push_back(static_cast<double>(i));
    sp.preference_set.push_back(static_cast<double>(-i));
  }
  for (int i = 0; i < n; ++i) out.integer_ids.push_back(i);
  for (int k = 0; k < nsub; ++k) out.subset_ids.push_back(n + k);
  sp.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Instance-wise polygon construction: n copies of the origin with r = +1,
// each allowed to move inside the symmetrized hull of the circle points whose
// bitmask contains its index. Any label pattern is realized by a line that
// strictly cuts off the pattern's circle point.

struct Thm3Construction {
  int n = 0;
  std::vector<Vec> circle;            // 2^n points, index = subset bitmask
  std::vector<DataPoint> points;      // n origins with r = +1
  std::vector<Seminorm> costs;        // per-point polygon gauges
  std::vector<Hyperplane> witnesses;  // one per pattern bitmask
};

inline Thm3Construction build_thm3_polygons(int n) {
  if (n < 1 || n > 4) throw InvalidInput("build_thm3_polygons: n must be in 1..4");
  Thm3Construction out;
  out.n = n;
  const int m = 1 << n;
  // Circle points live on the open upper half-circle so that the antipodal
  // copies S-bar stay disjoint from S; equally spaced grids would collide
  // with their own antipodes.
  for (int k = 0; k < m; ++k) {
    double th = M_PI * (k + 0.5) / m;
    out.circle.push_back({std::cos(th), std::sin(th)});
  }
  for (int i = 0; i < n; ++i) {
    std::vector<Vec> verts;
    for (int k = 0; k < m; ++k) {
      if ((k >> i) & 1) {
        verts.push_back(out.circle[static_cast<size_t>(k)]);
        verts.push_back(scaled(out.circle[static_cast<size_t>(k)], -1.0));
      }
    }
    out.costs.push_back(Seminorm::polytope(std::move(verts)));
    out.points.push_back(DataPoint{{0.0, 0.0}, 1, 1.0});
  }
  // minimal angular gap over S and S-bar is pi/m; any threshold strictly
  // between cos(pi/m) and 1 separates a circle point from all the others
  double t = std::cos(M_PI / m) + 0.5 * (1.0 - std::cos(M_PI / m));
  for (int k = 0; k < m; ++k)
    out.witnesses.push_back(Hyperplane{out.circle[static_cast<size_t>(k)], -t});
  return out;
}

// ---------------------------------------------------------------------------
// Shattering over explicit linear families with seminorm costs.

inline ShatterReport shattering_coefficient_linear(const std::vector<DataPoint>& points,
                                                   const std::vector<Seminorm>& costs,
                                                   const std::vector<Hyperplane>& family,
                                                   double eta = kEta) {
  if (points.size() != costs.size())
    throw InvalidInput("shattering_coefficient_linear: costs must match points");
  if (points.size() > 20) throw ResourceLimit("shattering_coefficient_linear: too many points");
  ShatterReport rep;
  rep.n = static_cast<int>(points.size());
  std::set<uint32_t> seen;
  for (size_t h = 0; h < family.size(); ++h) {
    uint32_t pat = 0;
    for (size_t i = 0; i < points.size(); ++i)
      if (best_response_label(family[h], points[i], costs[i], eta) == 1) pat |= 1u << i;
    if (seen.insert(pat).second) rep.witnesses.push_back({pat, static_cast<int>(h)});
  }
  rep.sigma = seen.size();
  return rep;
}

// ---------------------------------------------------------------------------
// Lower-bound construction for instance-invariant costs: the origin plus a
// basis of the complement of the kernel, inflated so that no preference can
// push a point across its witness hyperplane.

struct Thm4Construction {
  int dim = 0;
  int count = 0;                      // d + 1 - dim(V_l) points
  std::vector<DataPoint> points;
  std::vector<Hyperplane> witnesses;  // one per subset bitmask of the points
  double delta = 1.0;
};

namespace detail {

// solve a (k x k) dense system by partial-pivot elimination
inline Vec solve_dense(Mat A, Vec rhs) {
  const int k = static_cast<int>(rhs.size());
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::fabs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
          std::fabs(A[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
        piv = r;
    std::swap(A[static_cast<size_t>(col)], A[static_cast<size_t>(piv)]);
    std::swap(rhs[static_cast<size_t>(col)], rhs[static_cast<size_t>(piv)]);
    double d = A[static_cast<size_t>(col)][static_cast<size_t>(col)];
    if (std::fabs(d) < 1e-12) throw InvalidInput("solve_dense: singular system");
    for (int r = col + 1; r < k; ++r) {
      double f = A[static_cast<size_t>(r)][static_cast<size_t>(col)] / d;
      if (f == 0.0) continue;
      for (int c = col; c < k; ++c)
        A[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
            f * A[static_cast<size_t>(col)][static_cast<size_t>(c)];
      rhs[static_cast<size_t>(r)] -= f * rhs[static_cast<size_t>(col)];
    }
  }
  Vec x(static_cast<size_t>(k), 0.0);
  for (int r = k - 1; r >= 0; --r) {
    double s = rhs[static_cast<size_t>(r)];
    for (int c = r + 1; c < k; ++c)
      s -= A[static_cast<size_t>(r)][static_cast<size_t>(c)] * x[static_cast<size_t>(c)];
    x[static_cast<size_t>(r)] = s / A[static_cast<size_t>(r)][static_cast<size_t>(r)];
  }
  return x;
}

// orthonormal basis of the complement of the seminorm's kernel
inline std::vector<Vec> complement_basis(const Seminorm& l) {
  const int d = l.dim();
  std::vector<Vec> basis;
  for (int i = 0; i < d; ++i) {
    Vec v = l.kernel.empty() ? unit(d, i) : l.project_off_kernel(unit(d, i));
    for (const auto& u : basis) axpy(v, -dot(u, v), u);
    double n = norm2(v);
    if (n > 1e-10) {
      for (auto& x : v) x /= n;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

}  // namespace detail

inline Thm4Construction build_thm4_lowerbound(int d, const Seminorm& l, const Vec& r_sample) {
  if (l.dim() != d) throw InvalidInput("build_thm4_lowerbound: dimension mismatch");
  if (r_sample.empty()) throw InvalidInput("build_thm4_lowerbound: empty preference sample");
  Thm4Construction out;
  out.dim = d;
  std::vector<Vec> perp = detail::complement_basis(l);  // x_1..x_t
  const int t = static_cast<int>(perp.size());
  out.count = t + 1;

  std::vector<Vec> base_pts;
  base_pts.push_back(zeros(d));  // x_0
  for (const auto& v : perp) base_pts.push_back(v);

  Vec prefs(static_cast<size_t>(out.count));
  for (int i = 0; i < out.count; ++i)
    prefs[static_cast<size_t>(i)] = r_sample[static_cast<size_t>(i) % r_sample.size()];

  // solve one linear system per subset; rows: pattern equations + kernel rows
  std::vector<std::pair<Vec, double>> raw_witnesses;
  double delta_max = 0.0;
  for (uint32_t mask = 0; mask < (1u << out.count); ++mask) {
    Mat A;
    Vec rhs;
    for (int i = 0; i < out.count; ++i) {
      Vec row = base_pts[static_cast<size_t>(i)];
      row.push_back(1.0);
      A.push_back(std::move(row));
      rhs.push_back((mask >> i) & 1 ? 1.0 : -1.0);
    }
    for (const auto& kb : l.kernel) {
      Vec row = kb;
      row.push_back(0.0);
      A.push_back(std::move(row));
      rhs.push_back(0.0);
    }
    Vec sol = detail::solve_dense(std::move(A), std::move(rhs));
    Vec w(sol.begin(), sol.begin() + d);
    double b = sol[static_cast<size_t>(d)];
    double dn = dual_norm(l, w);
    if (std::isinf(dn)) throw InvalidInput("build_thm4_lowerbound: witness not orthogonal to kernel");
    for (int i = 0; i < out.count; ++i)
      delta_max = std::max(delta_max, std::fabs(prefs[static_cast<size_t>(i)]) * dn);
    raw_witnesses.push_back({std::move(w), b});
  }
  // One inflation covers every subset: margins scale with delta while the
  // preference reach stays fixed, because only b is rescaled.
  out.delta = std::max(1.0, 2.0 * delta_max);
  for (int i = 0; i < out.count; ++i)
    out.points.push_back(
        DataPoint{scaled(base_pts[static_cast<size_t>(i)], out.delta), 1,
                  prefs[static_cast<size_t>(i)]});
  for (auto& [w, b] : raw_witnesses)
    out.witnesses.push_back(Hyperplane{std::move(w), out.delta * b});
  return out;
}

// ---------------------------------------------------------------------------
// Upper-bound falsifier: random point sets one larger than the bound, with
// breakpoint-complete classifier sweeps; a violation would be a full
// shattering, which the bound rules out.

struct FalsifierReport {
  int trials = 0;
  int set_size = 0;       // d + 2 - dim(V_l)
  int violations = 0;
  uint64_t max_patterns = 0;
  int pair_checks = 0;    // trials where the proof's pattern pair was testable
  int pair_holds = 0;     // ... and at least one of the two patterns was missing
};

inline FalsifierReport thm4_upperbound_falsifier(int d, const Seminorm& l, int trials,
                                                 uint64_t seed, double eta = kEta) {
  if (l.dim() != d) throw InvalidInput("thm4_upperbound_falsifier: dimension mismatch");
  Rng rng(seed);
  FalsifierReport rep;
  rep.trials = trials;
  std::vector<Vec> perp = detail::complement_basis(l);
  const int m = static_cast<int>(perp.size()) + 2;  // d + 2 - dim(V_l)
  rep.set_size = m;
  const uint64_t full = 1ull << m;

  for (int trial = 0; trial < trials; ++trial) {
    std::vector<Vec> xs(static_cast<size_t>(m));
    Vec rs(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
      xs[static_cast<size_t>(i)].resize(static_cast<size_t>(d));
      for (auto& c : xs[static_cast<size_t>(i)]) c = rng.uniform(-3.0, 3.0);
      rs[static_cast<size_t>(i)] = rng.uniform(-2.0, 2.0);
    }
    std::set<uint32_t> patterns;
    auto record = [&](const Hyperplane& h, double dual) {
      uint32_t pat = 0;
      for (int i = 0; i < m; ++i) {
        int lab = h.is_constant()
                      ? predict_raw(h, xs[static_cast<size_t>(i)], eta)
                      : best_response_label_dual(h, xs[static_cast<size_t>(i)],
                                                 rs[static_cast<size_t>(i)], dual, eta);
        if (lab == 1) pat |= 1u << i;
      }
      patterns.insert(pat);
    };
    record(Hyperplane{zeros(d), 1.0}, 0.0);
    record(Hyperplane{zeros(d), -1.0}, 0.0);
    for (int k = 0; k < 64; ++k) {
      Vec w = rng.unit_direction(d);
      double dual = dual_norm(l, w);
      if (dual == 0.0) continue;
      if (std::isinf(dual)) {
        record(Hyperplane{w, 0.0}, dual);
        continue;
      }
      std::vector<double> bs;
      for (int i = 0; i < m; ++i)
        bs.push_back(-dot(w, xs[static_cast<size_t>(i)]) - rs[static_cast<size_t>(i)] * dual);
      double span = 1.0;
      for (double b : bs) span = std::max(span, std::fabs(b));
      for (double b : bs) {
        record(Hyperplane{w, b - 1e-7 * span}, dual);
        record(Hyperplane{w, b}, dual);
        record(Hyperplane{w, b + 1e-7 * span}, dual);
      }
      record(Hyperplane{w, -2.0 * span}, dual);
      record(Hyperplane{w, 2.0 * span}, dual);
    }
    rep.max_patterns = std::max<uint64_t>(rep.max_patterns, patterns.size());
    if (patterns.size() == full) {
      ++rep.violations;
      continue;
    }
    // the proof's obstruction pair: some u orthogonal to the span of
    // achievable value vectors; sgn(u) and all-negatives cannot both appear
    Mat rows;
    for (const auto& pb : perp) {
      Vec row(static_cast<size_t>(m));
      for (int i = 0; i < m; ++i) row[static_cast<size_t>(i)] = dot(pb, xs[static_cast<size_t>(i)]);
      rows.push_back(std::move(row));
    }
    rows.push_back(Vec(static_cast<size_t>(m), 1.0));
    // null-space vector of the row span via elimination
    Mat A = rows;
    std::vector<int> pivot_col;
    size_t rrow = 0;
    for (int col = 0; col < m && rrow < A.size(); ++col) {
      size_t piv = rrow;
      for (size_t rr = rrow; rr < A.size(); ++rr)
        if (std::fabs(A[rr][static_cast<size_t>(col)]) >
            std::fabs(A[piv][static_cast<size_t>(col)]))
          piv = rr;
      if (std::fabs(A[piv][static_cast<size_t>(col)]) < 1e-9) continue;
      std::swap(A[rrow], A[piv]);
      for (size_t rr = 0; rr < A.size(); ++rr) {
        if (rr == rrow) continue;
        double f = A[rr][static_cast<size_t>(col)] / A[rrow][static_cast<size_t>(col)];
        if (f == 0.0) continue;
        for (int c = 0; c < m; ++c)
          A[rr][static_cast<size_t>(c)] -= f * A[rrow][static_cast<size_t>(c)];
      }
      pivot_col.push_back(col);
      ++rrow;
    }
    int free_col = -1;
    for (int c = 0; c < m; ++c)
      if (std::find(pivot_col.begin(), pivot_col.end(), c) == pivot_col.end()) {
        free_col = c;
        break;
      }
    if (free_col < 0) continue;
    Vec u(static_cast<size_t>(m), 0.0);
    u[static_cast<size_t>(free_col)] = 1.0;
    for (size_t rr = 0; rr < pivot_col.size(); ++rr) {
      int pc = pivot_col[rr];
      u[static_cast<size_t>(pc)] = -A[rr][static_cast<size_t>(free_col)] /
                                   A[rr][static_cast<size_t>(pc)];
    }
    if (dot(u, rs) > 0) for (auto& v : u) v = -v;
    bool has_zero = false;
    uint32_t upat = 0;
    for (int i = 0; i < m; ++i) {
      if (std::fabs(u[static_cast<size_t>(i)]) < 1e-9) has_zero = true;
      if (u[static_cast<size_t>(i)] > 0) upat |= 1u << i;
    }
    if (!has_zero) {
      ++rep.pair_checks;
      bool u_missing = patterns.find(upat) == patterns.end();
      bool neg_missing = patterns.find(0u) == patterns.end();
      if (u_missing || neg_missing) ++rep.pair_holds;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Separable-cost probe: exhaustively look for a shattered triple (there
// should be none when 0 is not in R).

struct SeparableProbeReport {
  int max_shattered = 0;
  long trials = 0;
  bool found_triple = false;
};

inline SeparableProbeReport separable_svc_probe(const Vec& c1, const Vec& c2,
                                                const std::vector<std::vector<int8_t>>& family,
                                                const Vec& r_sample, long trial_budget) {
  if (c1.size() != c2.size()) throw InvalidInput("separable_svc_probe: table sizes");
  for (double r : r_sample)
    if (r == 0.0) throw InvalidInput("separable_svc_probe: 0 must not be in R");
  const int m = static_cast<int>(c1.size());
  SeparableProbeReport rep;

  auto pattern_count = [&](const std::vector<int>& idx, const std::vector<int>& ri) {
    std::set<uint32_t> seen;
    for (const auto& h : family) {
      uint32_t pat = 0;
      for (size_t i = 0; i < idx.size(); ++i) {
        int lab = separable_best_response_label(h, idx[i], r_sample[static_cast<size_t>(ri[i])],
                                                c1, c2);
        if (lab == 1) pat |= 1u << i;
      }
      seen.insert(pat);
    }
    return seen.size();
  };

  const size_t nr = r_sample.size();
  for (int n : {1, 2, 3}) {
    bool shattered_n = false;
    detail::for_each_subset(m, n, [&](const std::vector<int>& idx) {
      if (rep.trials >= trial_budget && rep.max_shattered >= 2) return;
      std::vector<int> ri(static_cast<size_t>(n), 0);
      while (true) {
        ++rep.trials;
        if (pattern_count(idx, ri) == (1u << n)) shattered_n = true;
        size_t k = 0;
        while (k < static_cast<size_t>(n) && ++ri[k] == static_cast<int>(nr)) {
          ri[k] = 0;
          ++k;
        }
        if (k == static_cast<size_t>(n)) break;
      }
    });
    if (shattered_n) rep.max_shattered = n;
  }
  rep.found_triple = rep.max_shattered >= 3;
  return rep;
}

}  // namespace stratlearn
