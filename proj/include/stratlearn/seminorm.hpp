#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "stratlearn/common.hpp"
#include "stratlearn/lp.hpp"

namespace stratlearn {

// A linear classifier w.x + b = 0, with the boundary classified positive.
// w may be the zero vector, in which case the classifier is constant.
struct Hyperplane {
  Vec w;
  double b = 0.0;

  bool is_constant(double tol = 1e-12) const { return norm_inf(w) <= tol; }
};

enum class SeminormKind { WeightedLp, Polytope, Degenerate };

// Cost-inducing gauge. Three variants:
//   weighted-lp  : l(v) = ||diag(a) v||_p with p in {1, 2, inf}, a > 0
//   polytope     : gauge of an origin-symmetric vertex list
//   degenerate   : base seminorm applied to the component orthogonal to a
//                  stored kernel basis (the subspace V_l the ball contains)
// Values are immutable once built; all operations are const and thread-safe.
class Seminorm {
 public:
  SeminormKind kind = SeminormKind::WeightedLp;
  double p = 2.0;  // 1, 2, or +inf
  Vec weights;
  std::vector<Vec> vertices;
  std::shared_ptr<const Seminorm> base;
  std::vector<Vec> kernel;  // orthonormalized basis of V_l

  int dim() const { return dim_; }

  static Seminorm lp(double pp, Vec w) {
    if (w.empty()) throw InvalidInput("Seminorm::lp: empty weights");
    if (pp != 1.0 && pp != 2.0 && pp != kInf)
      throw InvalidInput("Seminorm::lp: p must be 1, 2 or inf");
    for (double a : w)
      if (!(a > 0.0) || !std::isfinite(a))
        throw InvalidInput("Seminorm::lp: weights must be positive");
    Seminorm s;
    s.kind = SeminormKind::WeightedLp;
    s.p = pp;
    s.weights = std::move(w);
    s.dim_ = static_cast<int>(s.weights.size());
    return s;
  }

  static Seminorm l1(int d) { return lp(1.0, Vec(static_cast<size_t>(d), 1.0)); }
  static Seminorm l2(int d) { return lp(2.0, Vec(static_cast<size_t>(d), 1.0)); }
  static Seminorm linf(int d) { return lp(kInf, Vec(static_cast<size_t>(d), 1.0)); }

  static Seminorm polytope(std::vector<Vec> verts) {
    if (verts.empty()) throw InvalidInput("Seminorm::polytope: empty vertex list");
    const size_t d = verts[0].size();
    for (const auto& v : verts)
      if (v.size() != d || !all_finite(v))
        throw InvalidInput("Seminorm::polytope: bad vertex");
    // origin symmetry: every vertex needs its antipode in the list
    for (const auto& v : verts) {
      bool found = false;
      for (const auto& u : verts) {
        double err = 0.0;
        for (size_t i = 0; i < d; ++i) err = std::max(err, std::fabs(u[i] + v[i]));
        if (err <= 1e-9) {
          found = true;
          break;
        }
      }
      if (!found) throw InvalidInput("Seminorm::polytope: vertex list not origin-symmetric");
    }
    Seminorm s;
    s.kind = SeminormKind::Polytope;
    s.vertices = std::move(verts);
    s.dim_ = static_cast<int>(d);
    s.build_hrep_2d();
    return s;
  }

  static Seminorm degenerate(Seminorm base_norm, std::vector<Vec> kernel_basis) {
    if (base_norm.kind == SeminormKind::Degenerate)
      throw InvalidInput("Seminorm::degenerate: nested degenerate seminorms unsupported");
    Seminorm s;
    s.kind = SeminormKind::Degenerate;
    s.dim_ = base_norm.dim();
    s.base = std::make_shared<const Seminorm>(std::move(base_norm));
    // Gram-Schmidt so projections are cheap and exact-ish.
    for (auto v : kernel_basis) {
      if (static_cast<int>(v.size()) != s.dim_)
        throw InvalidInput("Seminorm::degenerate: kernel basis dimension mismatch");
      for (const auto& u : s.kernel) axpy(v, -dot(u, v), u);
      double n = norm2(v);
      if (n > 1e-10) {
        for (auto& x : v) x /= n;
        s.kernel.push_back(std::move(v));
      }
    }
    if (s.kernel.empty())
      throw InvalidInput("Seminorm::degenerate: kernel basis spans nothing");
    return s;
  }

  // Regular inscribed approximation of a weighted-l2 ball by a polytope.
  // d=1 is exact; d=2 uses an n_2d-gon; d=3 refines the octahedron
  // `refine_3d` times (6 -> 18 -> 66 vertices). Higher dimensions fall back
  // to the cross-polytope, which is only a coarse inner bound.
  static Seminorm l2_polytope(const Vec& w, int n_2d = 256, int refine_3d = 2);

  Vec project_off_kernel(const Vec& v) const {
    Vec r = v;
    for (const auto& u : kernel) axpy(r, -dot(u, r), u);
    return r;
  }

  Vec project_on_kernel(const Vec& v) const {
    Vec r = zeros(dim_);
    for (const auto& u : kernel) axpy(r, dot(u, v), u);
    return r;
  }

  // 2D full-dimensional polytopes carry an H-representation for O(edges)
  // gauge evaluation; everything else goes through an LP.
  bool has_hrep() const { return !hrep_normals_.empty(); }
  const std::vector<Vec>& hrep_normals() const { return hrep_normals_; }
  const Vec& hrep_offsets() const { return hrep_offsets_; }

 private:
  int dim_ = 0;
  std::vector<Vec> hrep_normals_;
  Vec hrep_offsets_;

  void build_hrep_2d() {
    if (dim_ != 2) return;
    std::vector<Vec> vs = vertices;
    std::sort(vs.begin(), vs.end(), [](const Vec& a, const Vec& b) {
      return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
    });
    vs.erase(std::unique(vs.begin(), vs.end(),
                         [](const Vec& a, const Vec& b) {
                           return std::fabs(a[0] - b[0]) + std::fabs(a[1] - b[1]) < 1e-12;
                         }),
             vs.end());
    if (vs.size() < 3) return;
    // reject collinear vertex sets (not full-dimensional)
    bool planar = false;
    for (size_t i = 1; i + 1 < vs.size() && !planar; ++i) {
      double cr = (vs[i][0] - vs[0][0]) * (vs[i + 1][1] - vs[0][1]) -
                  (vs[i][1] - vs[0][1]) * (vs[i + 1][0] - vs[0][0]);
      planar = std::fabs(cr) > 1e-12;
    }
    if (!planar) return;
    for (size_t i = 0; i < vs.size(); ++i) {
      const Vec& a = vs[i];
      const Vec& b = vs[(i + 1) % vs.size()];
      Vec n = {a[1] - b[1], b[0] - a[0]};  // outward for CCW order
      double c = n[0] * a[0] + n[1] * a[1];
      if (c < 0) {
        n[0] = -n[0];
        n[1] = -n[1];
        c = -c;
      }
      if (c < 1e-12) return;  // origin on an edge line: hull not solid
      hrep_normals_.push_back(std::move(n));
      hrep_offsets_.push_back(c);
    }
  }
};

// Gauge of v with respect to conv(vertices): inf{ t >= 0 : v in t * hull }.
// Solved as min sum(lambda) s.t. V lambda = v, lambda >= 0; infeasible means
// v lies outside the span of the hull and the gauge is +inf.
inline double polygon_gauge(const std::vector<Vec>& verts, const Vec& v) {
  if (verts.empty()) throw InvalidInput("polygon_gauge: no vertices");
  const int d = static_cast<int>(verts[0].size());
  if (static_cast<int>(v.size()) != d)
    throw InvalidInput("polygon_gauge: dimension mismatch");
  double vmax = norm_inf(v);
  if (vmax == 0.0) return 0.0;

  LinearProgram lp;
  lp.nvars = static_cast<int>(verts.size());
  lp.maximize = false;
  lp.objective.assign(verts.size(), 1.0);
  lp.nonneg.assign(verts.size(), true);
  for (int i = 0; i < d; ++i) {
    Vec row(verts.size());
    for (size_t k = 0; k < verts.size(); ++k) row[k] = verts[k][static_cast<size_t>(i)];
    lp.add_row(std::move(row), 'E', v[static_cast<size_t>(i)]);
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) return kInf;
  if (sol.status != LpStatus::Optimal)
    throw InvalidInput("polygon_gauge: LP failed");
  return sol.objective;
}

inline double eval_seminorm(const Seminorm& l, const Vec& v) {
  if (static_cast<int>(v.size()) != l.dim())
    throw InvalidInput("eval_seminorm: dimension mismatch");
  switch (l.kind) {
    case SeminormKind::WeightedLp: {
      if (l.p == 1.0) {
        double s = 0.0;
        for (size_t i = 0; i < v.size(); ++i) s += l.weights[i] * std::fabs(v[i]);
        return s;
      }
      if (l.p == 2.0) {
        double s = 0.0;
        for (size_t i = 0; i < v.size(); ++i) {
          double t = l.weights[i] * v[i];
          s += t * t;
        }
        return std::sqrt(s);
      }
      double m = 0.0;
      for (size_t i = 0; i < v.size(); ++i)
        m = std::max(m, l.weights[i] * std::fabs(v[i]));
      return m;
    }
    case SeminormKind::Polytope: {
      if (l.has_hrep()) {
        double g = 0.0;
        const auto& ns = l.hrep_normals();
        const auto& cs = l.hrep_offsets();
        for (size_t e = 0; e < ns.size(); ++e)
          g = std::max(g, (ns[e][0] * v[0] + ns[e][1] * v[1]) / cs[e]);
        return g;
      }
      return polygon_gauge(l.vertices, v);
    }
    case SeminormKind::Degenerate:
      return eval_seminorm(*l.base, l.project_off_kernel(v));
  }
  throw InvalidInput("eval_seminorm: bad kind");
}

struct DualResult {
  double value = 0.0;     // +inf when w is not orthogonal to the kernel
  Vec maximizer;          // unit-ball element attaining the sup, when available
  bool has_maximizer = false;
};

namespace detail {

// sup of w.u over { u in perp(kernel) : u in conv(verts) } plus a maximizer,
// via an LP over hull coefficients.
inline DualResult section_sup(const std::vector<Vec>& verts,
                              const std::vector<Vec>& kernel, const Vec& w) {
  const size_t n = verts.size();
  const int d = static_cast<int>(w.size());
  LinearProgram lp;
  lp.nvars = static_cast<int>(n);
  lp.maximize = true;
  lp.nonneg.assign(n, true);
  lp.objective.resize(n);
  for (size_t k = 0; k < n; ++k) lp.objective[k] = dot(w, verts[k]);
  lp.add_row(Vec(n, 1.0), 'E', 1.0);
  for (const auto& kb : kernel) {
    Vec row(n);
    for (size_t k = 0; k < n; ++k) row[k] = dot(kb, verts[k]);
    lp.add_row(std::move(row), 'E', 0.0);
  }
  LpSolution sol = solve_lp(lp);
  DualResult out;
  if (sol.status == LpStatus::Infeasible) {
    out.value = 0.0;  // section is empty in this direction; cannot happen for symmetric hulls
    return out;
  }
  if (sol.status != LpStatus::Optimal) throw InvalidInput("section_sup: LP failed");
  out.value = std::max(0.0, sol.objective);
  Vec z = zeros(d);
  for (size_t k = 0; k < n; ++k) axpy(z, sol.x[k], verts[k]);
  out.maximizer = std::move(z);
  out.has_maximizer = true;
  return out;
}

}  // namespace detail

// Dual norm l*(w) = sup { w.z : l(z) <= 1 }, together with a maximizing
// unit-ball element when the sup is finite and attained. The value is +inf
// exactly when w is not orthogonal to the kernel of l.
inline DualResult dual_norm_witness(const Seminorm& l, const Vec& w) {
  if (static_cast<int>(w.size()) != l.dim())
    throw InvalidInput("dual_norm: dimension mismatch");
  DualResult out;
  switch (l.kind) {
    case SeminormKind::WeightedLp: {
      const int d = l.dim();
      if (l.p == 1.0) {
        // ball vertices +-e_i / a_i; dual is the weighted max norm
        int best = 0;
        double bv = -1.0;
        for (int i = 0; i < d; ++i) {
          double t = std::fabs(w[static_cast<size_t>(i)]) / l.weights[static_cast<size_t>(i)];
          if (t > bv + 1e-15) {
            bv = t;
            best = i;
          }
        }
        out.value = bv;
        double sgn = w[static_cast<size_t>(best)] >= 0 ? 1.0 : -1.0;
        out.maximizer = unit(d, best, sgn / l.weights[static_cast<size_t>(best)]);
        out.has_maximizer = true;
        return out;
      }
      if (l.p == 2.0) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          double t = w[static_cast<size_t>(i)] / l.weights[static_cast<size_t>(i)];
          s += t * t;
        }
        out.value = std::sqrt(s);
        out.maximizer = zeros(d);
        if (out.value > 0) {
          for (int i = 0; i < d; ++i)
            out.maximizer[static_cast<size_t>(i)] =
                w[static_cast<size_t>(i)] /
                (l.weights[static_cast<size_t>(i)] * l.weights[static_cast<size_t>(i)] * out.value);
        }
        out.has_maximizer = true;
        return out;
      }
      // weighted max norm: dual is the weighted l1 norm
      out.value = 0.0;
      out.maximizer = zeros(d);
      for (int i = 0; i < d; ++i) {
        double a = l.weights[static_cast<size_t>(i)];
        out.value += std::fabs(w[static_cast<size_t>(i)]) / a;
        if (w[static_cast<size_t>(i)] > 0)
          out.maximizer[static_cast<size_t>(i)] = 1.0 / a;
        else if (w[static_cast<size_t>(i)] < 0)
          out.maximizer[static_cast<size_t>(i)] = -1.0 / a;
      }
      out.has_maximizer = true;
      return out;
    }
    case SeminormKind::Polytope: {
      size_t best = 0;
      double bv = -kInf;
      for (size_t k = 0; k < l.vertices.size(); ++k) {
        double t = dot(w, l.vertices[k]);
        if (t > bv + 1e-15) {
          bv = t;
          best = k;
        }
      }
      out.value = std::max(0.0, bv);
      out.maximizer = l.vertices[best];
      out.has_maximizer = true;
      return out;
    }
    case SeminormKind::Degenerate: {
      Vec wk = l.project_on_kernel(w);
      double scale = std::max(1.0, norm_inf(w));
      if (norm_inf(wk) > 1e-10 * scale) {
        out.value = kInf;
        out.has_maximizer = false;
        return out;
      }
      const Seminorm& b = *l.base;
      if (b.kind == SeminormKind::WeightedLp && b.p == 2.0) {
        // maximize w.u over the ellipsoid slice orthogonal to the kernel:
        // parametrize by an orthonormal basis P of the complement and solve
        // (P' diag(a^2) P) y = P' w.
        const int d = l.dim();
        std::vector<Vec> P;
        for (int i = 0; i < d; ++i) {
          Vec v = l.project_off_kernel(unit(d, i));
          for (const auto& u : P) axpy(v, -dot(u, v), u);
          double n = norm2(v);
          if (n > 1e-10) {
            for (auto& x : v) x /= n;
            P.push_back(std::move(v));
          }
        }
        const int t = static_cast<int>(P.size());
        if (t == 0) {
          out.value = 0.0;
          out.maximizer = zeros(d);
          out.has_maximizer = true;
          return out;
        }
        Mat M(static_cast<size_t>(t), Vec(static_cast<size_t>(t), 0.0));
        Vec g(static_cast<size_t>(t), 0.0);
        for (int i = 0; i < t; ++i) {
          g[static_cast<size_t>(i)] = dot(P[static_cast<size_t>(i)], w);
          for (int j = 0; j < t; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k)
              s += P[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                   b.weights[static_cast<size_t>(k)] * b.weights[static_cast<size_t>(k)] *
                   P[static_cast<size_t>(j)][static_cast<size_t>(k)];
            M[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
          }
        }
        // solve M y = g by Gaussian elimination with partial pivoting
        Vec y = g;
        Mat A = M;
        std::vector<int> piv(static_cast<size_t>(t));
        for (int i = 0; i < t; ++i) piv[static_cast<size_t>(i)] = i;
        for (int col = 0; col < t; ++col) {
          int pr = col;
          for (int r = col + 1; r < t; ++r)
            if (std::fabs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::fabs(A[static_cast<size_t>(pr)][static_cast<size_t>(col)]))
              pr = r;
          std::swap(A[static_cast<size_t>(col)], A[static_cast<size_t>(pr)]);
          std::swap(y[static_cast<size_t>(col)], y[static_cast<size_t>(pr)]);
          double d0 = A[static_cast<size_t>(col)][static_cast<size_t>(col)];
          if (std::fabs(d0) < 1e-14) throw InvalidInput("dual_norm: singular metric");
          for (int r = col + 1; r < t; ++r) {
            double f = A[static_cast<size_t>(r)][static_cast<size_t>(col)] / d0;
            for (int cc = col; cc < t; ++cc)
              A[static_cast<size_t>(r)][static_cast<size_t>(cc)] -=
                  f * A[static_cast<size_t>(col)][static_cast<size_t>(cc)];
            y[static_cast<size_t>(r)] -= f * y[static_cast<size_t>(col)];
          }
        }
        for (int r = t - 1; r >= 0; --r) {
          for (int cc = r + 1; cc < t; ++cc)
            y[static_cast<size_t>(r)] -=
                A[static_cast<size_t>(r)][static_cast<size_t>(cc)] * y[static_cast<size_t>(cc)];
          y[static_cast<size_t>(r)] /= A[static_cast<size_t>(r)][static_cast<size_t>(r)];
        }
        double val2 = 0.0;
        for (int i = 0; i < t; ++i) val2 += g[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
        out.value = std::sqrt(std::max(0.0, val2));
        Vec z = zeros(d);
        if (out.value > 1e-300) {
          for (int i = 0; i < t; ++i)
            axpy(z, y[static_cast<size_t>(i)] / out.value, P[static_cast<size_t>(i)]);
        }
        out.maximizer = std::move(z);
        out.has_maximizer = true;
        return out;
      }
      // polytope-representable base: LP over the ball section
      std::vector<Vec> verts;
      if (b.kind == SeminormKind::Polytope) {
        verts = b.vertices;
      } else if (b.p == 1.0) {
        for (int i = 0; i < l.dim(); ++i) {
          verts.push_back(unit(l.dim(), i, 1.0 / b.weights[static_cast<size_t>(i)]));
          verts.push_back(unit(l.dim(), i, -1.0 / b.weights[static_cast<size_t>(i)]));
        }
      } else {  // weighted max norm: box corners
        if (l.dim() > 16) throw ResourceLimit("dual_norm: box has too many corners");
        for (int mask = 0; mask < (1 << l.dim()); ++mask) {
          Vec v(static_cast<size_t>(l.dim()));
          for (int i = 0; i < l.dim(); ++i)
            v[static_cast<size_t>(i)] =
                ((mask >> i) & 1 ? 1.0 : -1.0) / b.weights[static_cast<size_t>(i)];
          verts.push_back(std::move(v));
        }
      }
      return detail::section_sup(verts, l.kernel, w);
    }
  }
  throw InvalidInput("dual_norm: bad kind");
}

inline double dual_norm(const Seminorm& l, const Vec& w) {
  return dual_norm_witness(l, w).value;
}

// Lemma-style minimum manipulation cost from x to the hyperplane:
// |w.x + b| / l*(w). When l*(w) is infinite the crossing is free (the agent
// can slide along the kernel), so 0 is returned.
inline double min_cost_to_hyperplane(const Seminorm& l, const Vec& x, const Hyperplane& h) {
  if (static_cast<int>(x.size()) != l.dim() || h.w.size() != x.size())
    throw InvalidInput("min_cost_to_hyperplane: dimension mismatch");
  double ls = dual_norm(l, h.w);
  if (ls == 0.0) throw DegenerateDirection("min_cost_to_hyperplane: l*(w) = 0");
  double num = std::fabs(dot(h.w, x) + h.b);
  if (std::isinf(ls)) return 0.0;
  return num / ls;
}

inline Seminorm Seminorm::l2_polytope(const Vec& w, int n_2d, int refine_3d) {
  const int d = static_cast<int>(w.size());
  std::vector<Vec> verts;
  if (d == 1) {
    verts = {Vec{1.0}, Vec{-1.0}};
  } else if (d == 2) {
    if (n_2d < 4 || n_2d % 2 != 0)
      throw InvalidInput("l2_polytope: 2D vertex count must be even and >= 4");
    for (int k = 0; k < n_2d; ++k) {
      double th = 2.0 * M_PI * k / n_2d;
      verts.push_back({std::cos(th), std::sin(th)});
    }
  } else if (d == 3) {
    // octahedron subdivision projected onto the sphere
    std::vector<Vec> pts = {unit(3, 0), unit(3, 0, -1.0), unit(3, 1),
                            unit(3, 1, -1.0), unit(3, 2), unit(3, 2, -1.0)};
    std::vector<std::vector<int>> faces;
    for (int sx : {0, 1})
      for (int sy : {2, 3})
        for (int sz : {4, 5}) faces.push_back({sx, sy, sz});
    auto key = [](const Vec& v) {
      return std::array<long long, 3>{
          static_cast<long long>(std::llround(v[0] * 1e12)),
          static_cast<long long>(std::llround(v[1] * 1e12)),
          static_cast<long long>(std::llround(v[2] * 1e12))};
    };
    std::map<std::array<long long, 3>, int> seen;
    for (size_t i = 0; i < pts.size(); ++i) seen[key(pts[i])] = static_cast<int>(i);
    auto midpoint = [&](int a, int b) {
      Vec m = add(pts[static_cast<size_t>(a)], pts[static_cast<size_t>(b)]);
      double n = norm2(m);
      for (auto& x : m) x /= n;
      auto k = key(m);
      auto it = seen.find(k);
      if (it != seen.end()) return it->second;
      pts.push_back(m);
      seen[k] = static_cast<int>(pts.size()) - 1;
      return static_cast<int>(pts.size()) - 1;
    };
    for (int lev = 0; lev < refine_3d; ++lev) {
      std::vector<std::vector<int>> next;
      for (const auto& f : faces) {
        int ab = midpoint(f[0], f[1]);
        int bc = midpoint(f[1], f[2]);
        int ca = midpoint(f[2], f[0]);
        next.push_back({f[0], ab, ca});
        next.push_back({f[1], bc, ab});
        next.push_back({f[2], ca, bc});
        next.push_back({ab, bc, ca});
      }
      faces = std::move(next);
    }
    verts = pts;
  } else {
    for (int i = 0; i < d; ++i) {
      verts.push_back(unit(d, i));
      verts.push_back(unit(d, i, -1.0));
    }
  }
  for (auto& v : verts)
    for (int i = 0; i < d; ++i) v[static_cast<size_t>(i)] /= w[static_cast<size_t>(i)];
  return Seminorm::polytope(std::move(verts));
}

}  // namespace stratlearn
