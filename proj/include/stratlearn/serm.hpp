#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "stratlearn/common.hpp"
#include "stratlearn/lp.hpp"
#include "stratlearn/seminorm.hpp"
#include "stratlearn/strategic.hpp"

namespace stratlearn {

enum class SermStatus { Separated, Infeasible, NumericalFailure };

struct CertEntry {
  int index = 0;
  int case_id = 0;  // 1: y=+1,r>=0   2: y=+1,r<0   3: y=-1,r<0   4: y=-1,r>=0
  bool pass = false;
  double margin = 0.0;  // slack of the point's separability branch, in cost units
};

struct SermSolution {
  Hyperplane h;
  double epsilon = 0.0;
  SermStatus status = SermStatus::Infeasible;
  double alpha = 1.0;  // pre-rescaling dual value l*(w*); 1 when no rescaling applies
  double loss = 1.0;
  int bisect_iterations = 0;
  std::vector<CertEntry> certificate;
};

struct SermConfig {
  double eta = kEta;
  double eps_tol = 1e-6;
  int max_bisect = 80;  // hard cap; convergence is expected well under 60
  int vertex_cap = 64;  // per-point dual-ball vertex budget (instance-wise)
};

// Vertices of the primal unit ball, used to express l*(w) <= c as linear
// rows. Exact l2 balls are not polytopes; callers must supply the polytope
// approximation explicitly (Seminorm::l2_polytope) so the optimization is an
// honest LP over the instance's own cost.
inline std::vector<Vec> ball_vertices(const Seminorm& l) {
  const int d = l.dim();
  switch (l.kind) {
    case SeminormKind::Polytope:
      return l.vertices;
    case SeminormKind::WeightedLp: {
      std::vector<Vec> verts;
      if (l.p == 1.0) {
        for (int i = 0; i < d; ++i) {
          verts.push_back(unit(d, i, 1.0 / l.weights[static_cast<size_t>(i)]));
          verts.push_back(unit(d, i, -1.0 / l.weights[static_cast<size_t>(i)]));
        }
        return verts;
      }
      if (l.p == kInf) {
        if (d > 16) throw ResourceLimit("ball_vertices: box with 2^d corners, d too large");
        for (int mask = 0; mask < (1 << d); ++mask) {
          Vec v(static_cast<size_t>(d));
          for (int i = 0; i < d; ++i)
            v[static_cast<size_t>(i)] =
                ((mask >> i) & 1 ? 1.0 : -1.0) / l.weights[static_cast<size_t>(i)];
          verts.push_back(std::move(v));
        }
        return verts;
      }
      if (d == 1) {
        return {Vec{1.0 / l.weights[0]}, Vec{-1.0 / l.weights[0]}};
      }
      throw InvalidInput(
          "ball_vertices: exact l2 has no polytope ball; use Seminorm::l2_polytope");
    }
    case SeminormKind::Degenerate:
      throw InvalidInput("ball_vertices: degenerate costs are not supported by the LP solvers");
  }
  throw InvalidInput("ball_vertices: bad kind");
}

// Per-point evaluation of the four separability branches for (w, b). The
// margin is the branch slack in cost units (nonnegative margin means the
// positive-label branch holds; strictly positive means the negative one does).
inline std::vector<CertEntry> check_solution(const StrategicInstance& inst, const Hyperplane& h,
                                             double eta = kEta) {
  if (!inst.cost.seminorm_induced())
    throw InvalidInput("check_solution: requires a seminorm cost model");
  std::vector<CertEntry> cert;
  cert.reserve(inst.points.size());
  for (size_t i = 0; i < inst.points.size(); ++i) {
    const auto& p = inst.points[i];
    const Seminorm& l = inst.cost.seminorm_for(i);
    CertEntry e;
    e.index = static_cast<int>(i);
    e.case_id = p.y == 1 ? (p.r >= 0 ? 1 : 2) : (p.r < 0 ? 3 : 4);
    int lab;
    double s;
    if (h.is_constant()) {
      lab = predict_raw(h, p.x, eta);
      s = lab > 0 ? kInf : -kInf;
    } else {
      double dual = dual_norm(l, h.w);
      lab = best_response_label_dual(h, p.x, p.r, dual, eta);
      s = std::isinf(dual) ? (p.r > 0 ? kInf : (p.r < 0 ? -kInf : 0.0))
                           : (dot(h.w, p.x) + h.b) / dual;
    }
    e.pass = lab == p.y;
    e.margin = p.y == 1 ? s + p.r : -(s + p.r);
    cert.push_back(e);
  }
  return cert;
}

// Appendix-style tightening of the relaxed program's optimum back onto the
// dual sphere: wbar = w*/alpha, bbar = b*/alpha + (1/alpha - 1)(min- + max+)/2,
// epsbar = eps*/alpha.
inline void rescale_invariant_solution(Vec& w, double& b, double& eps, double alpha,
                                       double min_minus, double max_plus) {
  if (alpha <= 0.0) throw InvalidInput("rescale: alpha must be positive");
  double center = 0.0;
  if (std::isfinite(min_minus) && std::isfinite(max_plus))
    center = 0.5 * (min_minus + max_plus);
  else if (std::isfinite(min_minus))
    center = min_minus;
  else if (std::isfinite(max_plus))
    center = max_plus;
  for (auto& x : w) x /= alpha;
  b = b / alpha + (1.0 / alpha - 1.0) * center;
  eps = eps / alpha;
}

namespace detail {

inline SermSolution finish_solution(const StrategicInstance& inst, Hyperplane h, double eps,
                                    double alpha, const SermConfig& cfg) {
  SermSolution out;
  out.h = std::move(h);
  out.epsilon = eps;
  out.alpha = alpha;
  out.certificate = check_solution(inst, out.h, cfg.eta);
  out.loss = strategic_loss(out.h, inst, cfg.eta);
  bool all_pass = true;
  for (const auto& e : out.certificate) all_pass &= e.pass;
  out.status = (all_pass && out.loss == 0.0) ? SermStatus::Separated : SermStatus::NumericalFailure;
  return out;
}

}  // namespace detail

// Situation 1: instance-invariant seminorm cost, essentially adversarial
// preferences. Solves the relaxed program
//   max eps  s.t.  w.x_i + b >= -r_i (y_i=+1),
//                  w.x_i + b <= -r_i - eps (y_i=-1),  l*(w) <= 1
// as an LP over the ball's vertices, then tightens l*(w) to 1 by the
// rescaling above. The relaxation is tight exactly because min- >= max+.
inline SermSolution serm_invariant_essentially_adversarial(const StrategicInstance& inst,
                                                           const SermConfig& cfg = {}) {
  if (inst.points.empty()) throw InvalidInput("serm: empty instance");
  if (inst.cost.kind != CostKind::Invariant)
    throw InvalidInput("serm_invariant: requires an instance-invariant seminorm cost");
  PreferenceRegime reg = classify_regime(inst);
  if (reg.regime == Regime::General)
    throw RegimeViolation("serm_invariant: instance is not essentially adversarial");

  const int d = inst.dim;
  std::vector<Vec> verts = ball_vertices(inst.cost.seminorms[0]);

  // variables: w_0..w_{d-1}, b, eps
  LinearProgram lp;
  lp.nvars = d + 2;
  lp.maximize = true;
  lp.objective = zeros(d + 2);
  lp.objective[static_cast<size_t>(d + 1)] = 1.0;

  double r_abs = 0.0;
  for (const auto& p : inst.points) r_abs = std::max(r_abs, std::fabs(p.r));
  double x_abs = 0.0;
  for (const auto& p : inst.points) x_abs = std::max(x_abs, norm_inf(p.x));
  double eps_cap = 2.0 * r_abs + 2.0 * static_cast<double>(d) * x_abs + 10.0;

  for (const auto& p : inst.points) {
    Vec row = zeros(d + 2);
    for (int j = 0; j < d; ++j) row[static_cast<size_t>(j)] = p.x[static_cast<size_t>(j)];
    row[static_cast<size_t>(d)] = 1.0;
    if (p.y == 1) {
      lp.add_row(std::move(row), 'G', -p.r);
    } else {
      row[static_cast<size_t>(d + 1)] = 1.0;
      lp.add_row(std::move(row), 'L', -p.r);
    }
  }
  for (const auto& v : verts) {
    Vec row = zeros(d + 2);
    for (int j = 0; j < d; ++j) row[static_cast<size_t>(j)] = v[static_cast<size_t>(j)];
    lp.add_row(std::move(row), 'L', 1.0);
  }
  {
    Vec row = zeros(d + 2);
    row[static_cast<size_t>(d + 1)] = 1.0;
    lp.add_row(std::move(row), 'L', eps_cap);  // keeps one-label instances bounded
  }

  LpSolution sol = solve_lp(lp);
  SermSolution out;
  if (sol.status == LpStatus::NumericalFailure || sol.status == LpStatus::Unbounded) {
    out.status = SermStatus::NumericalFailure;
    return out;
  }
  if (sol.status == LpStatus::Infeasible) {
    out.status = SermStatus::Infeasible;
    return out;
  }
  double eps_star = sol.objective;
  if (eps_star <= cfg.eta) {
    out.status = SermStatus::Infeasible;
    out.epsilon = eps_star;  // record the failing margin
    return out;
  }
  Vec w(sol.x.begin(), sol.x.begin() + d);
  double b = sol.x[static_cast<size_t>(d)];
  {
    // second pass at the optimal eps: maximize the minimum positive-side
    // slack so binding rows do not sit exactly on the label threshold
    LinearProgram lp2;
    lp2.nvars = d + 2;  // w, b, t
    lp2.maximize = true;
    lp2.objective = zeros(d + 2);
    lp2.objective[static_cast<size_t>(d + 1)] = 1.0;
    for (const auto& p : inst.points) {
      Vec row = zeros(d + 2);
      for (int j = 0; j < d; ++j) row[static_cast<size_t>(j)] = p.x[static_cast<size_t>(j)];
      row[static_cast<size_t>(d)] = 1.0;
      if (p.y == 1) {
        row[static_cast<size_t>(d + 1)] = -1.0;
        lp2.add_row(std::move(row), 'G', -p.r);
      } else {
        lp2.add_row(std::move(row), 'L', -p.r - eps_star);
      }
    }
    for (const auto& v : verts) {
      Vec row = zeros(d + 2);
      for (int j = 0; j < d; ++j) row[static_cast<size_t>(j)] = v[static_cast<size_t>(j)];
      lp2.add_row(std::move(row), 'L', 1.0);
    }
    Vec cap = zeros(d + 2);
    cap[static_cast<size_t>(d + 1)] = 1.0;
    lp2.add_row(std::move(cap), 'L', eps_cap);
    LpSolution polished = solve_lp(lp2);
    if (polished.status == LpStatus::Optimal) {
      w.assign(polished.x.begin(), polished.x.begin() + d);
      b = polished.x[static_cast<size_t>(d)];
    }
  }
  double alpha = 0.0;
  for (const auto& v : verts) alpha = std::max(alpha, dot(w, v));
  double eps = eps_star;
  if (alpha > 1e-12) {
    rescale_invariant_solution(w, b, eps, alpha, reg.min_minus, reg.max_plus);
  } else {
    alpha = 0.0;  // constant classifier suffices (one-sided instance)
  }
  return detail::finish_solution(inst, Hyperplane{std::move(w), b}, eps, alpha, cfg);
}

namespace detail {

// System-(8)-style feasibility at a fixed eps. The system is positively
// homogeneous in (w, b) and admits the useless w = 0, so feasibility is
// probed with each coordinate of w pinned to +-1 in turn; `hint` remembers
// the orientation that worked last to keep the bisection cheap. With
// `max_margin` set, the positive-side rows (which carry no eps slack of
// their own) are pushed strictly interior by maximizing their minimum
// slack, so LP round-off cannot flip a boundary label afterwards.
inline std::optional<std::pair<Vec, double>> instancewise_feasible(
    const StrategicInstance& inst, const std::vector<std::vector<Vec>>& verts, double eps,
    int* hint, bool max_margin = false) {
  const int d = inst.dim;
  for (int probe = 0; probe < 2 * d; ++probe) {
    int orient = (*hint + probe) % (2 * d);
    int coord = orient / 2;
    double sign = orient % 2 == 0 ? 1.0 : -1.0;

    LinearProgram lp;
    const int nv = d + 1 + (max_margin ? 1 : 0);  // w, b [, t]
    lp.nvars = nv;
    lp.maximize = true;
    if (max_margin) {
      lp.objective = zeros(nv);
      lp.objective[static_cast<size_t>(d + 1)] = 1.0;
    }
    for (size_t i = 0; i < inst.points.size(); ++i) {
      const auto& p = inst.points[i];
      double coef = p.y == 1 ? -p.r : p.r + eps;  // multiplier on l*(w), nonnegative
      for (const auto& v : verts[i]) {
        // y=+1:  w.x + b >= (-r) w.v + t      y=-1:  -(w.x + b) >= (r+eps) w.v
        Vec row = zeros(nv);
        for (int j = 0; j < d; ++j) {
          double base = p.x[static_cast<size_t>(j)] * (p.y == 1 ? 1.0 : -1.0);
          row[static_cast<size_t>(j)] = base - coef * v[static_cast<size_t>(j)];
        }
        row[static_cast<size_t>(d)] = p.y == 1 ? 1.0 : -1.0;
        if (max_margin && p.y == 1) row[static_cast<size_t>(d + 1)] = -1.0;
        lp.add_row(std::move(row), 'G', 0.0);
      }
    }
    {
      Vec row = zeros(nv);
      row[static_cast<size_t>(coord)] = 1.0;
      lp.add_row(std::move(row), 'E', sign);
    }
    // keep the LP bounded; scale of (w, b) is free anyway
    for (int j = 0; j < nv; ++j) {
      Vec row = zeros(nv);
      row[static_cast<size_t>(j)] = 1.0;
      lp.add_row(row, 'L', 1e6);
      row[static_cast<size_t>(j)] = -1.0;
      lp.add_row(std::move(row), 'L', 1e6);
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Optimal) {
      *hint = orient;
      Vec w(sol.x.begin(), sol.x.begin() + d);
      return std::make_pair(std::move(w), sol.x[static_cast<size_t>(d)]);
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Situation 2: adversarial preferences with instance-wise seminorm costs.
// For fixed eps the constraints are linear after expanding each l*_{x_i}(w)
// over its dual-ball vertices; the largest workable eps is found by
// bisection (feasibility at eps implies feasibility on (0, eps]).
inline SermSolution serm_instancewise_adversarial(const StrategicInstance& inst,
                                                  const SermConfig& cfg = {}) {
  if (inst.points.empty()) throw InvalidInput("serm: empty instance");
  if (!inst.cost.seminorm_induced())
    throw InvalidInput("serm_instancewise: requires seminorm costs");
  PreferenceRegime reg = classify_regime(inst);
  if (reg.regime != Regime::Adversarial)
    throw RegimeViolation("serm_instancewise: instance is not adversarial");

  std::vector<std::vector<Vec>> verts(inst.points.size());
  double max_vert = 0.0;
  for (size_t i = 0; i < inst.points.size(); ++i) {
    verts[i] = ball_vertices(inst.cost.seminorm_for(i));
    if (static_cast<int>(verts[i].size()) > cfg.vertex_cap)
      throw ResourceLimit("serm_instancewise: dual ball exceeds the per-point vertex cap");
    for (const auto& v : verts[i]) max_vert = std::max(max_vert, norm2(v));
  }

  double r_abs = 0.0, diam = 0.0;
  for (const auto& p : inst.points) r_abs = std::max(r_abs, std::fabs(p.r));
  for (size_t i = 0; i < inst.points.size(); ++i)
    for (size_t j = i + 1; j < inst.points.size(); ++j)
      diam = std::max(diam, norm2(sub(inst.points[i].x, inst.points[j].x)));
  double eps_hi = r_abs + diam * max_vert + 1.0;

  int hint = 0;
  SermSolution out;
  auto at_tol = detail::instancewise_feasible(inst, verts, cfg.eps_tol, &hint);
  if (!at_tol) {
    out.status = SermStatus::Infeasible;
    out.epsilon = cfg.eps_tol;
    return out;
  }
  double lo = cfg.eps_tol;
  Vec w_best = at_tol->first;
  double b_best = at_tol->second;
  int iterations = 0;
  auto at_hi = detail::instancewise_feasible(inst, verts, eps_hi, &hint);
  double hi = eps_hi;
  if (at_hi) {
    w_best = at_hi->first;
    b_best = at_hi->second;
    lo = eps_hi;
  } else {
    while (iterations < cfg.max_bisect && hi - lo > cfg.eps_tol * std::max(1.0, lo)) {
      ++iterations;
      double mid = 0.5 * (lo + hi);
      auto res = detail::instancewise_feasible(inst, verts, mid, &hint);
      if (res) {
        lo = mid;
        w_best = res->first;
        b_best = res->second;
      } else {
        hi = mid;
      }
    }
  }
  // At the supremal eps the positive-side rows bind (they are what caps
  // eps), leaving labels exactly on the decision threshold. Back off within
  // the eps tolerance and maximize the positive-side slack until the
  // certificate is clean.
  SermSolution fin;
  double eps_used = lo;
  for (double delta : {0.0, 1.0, 8.0, 64.0, 512.0}) {
    eps_used = std::max(cfg.eps_tol, lo - delta * cfg.eps_tol * std::max(1.0, lo));
    auto polished = detail::instancewise_feasible(inst, verts, eps_used, &hint, true);
    if (polished) {
      w_best = polished->first;
      b_best = polished->second;
    }
    fin = detail::finish_solution(inst, Hyperplane{w_best, b_best}, eps_used, 1.0, cfg);
    if (fin.status == SermStatus::Separated) break;
  }
  fin.bisect_iterations = iterations;
  return fin;
}

// Deterministic low-discrepancy direction sweep. For each direction the
// strategic loss is piecewise constant in b with breakpoints
// b_i = -w.x_i - r_i l*_{x_i}(w); all of them (plus nudges to either side)
// are evaluated exactly, so the result upper-bounds the SERM optimum and is
// tight as the budget grows.
inline SermSolution serm_bruteforce(const StrategicInstance& inst, int direction_budget,
                                    double eta = kEta) {
  if (inst.points.empty()) throw InvalidInput("serm_bruteforce: empty instance");
  if (!inst.cost.seminorm_induced())
    throw InvalidInput("serm_bruteforce: requires seminorm costs");
  const int d = inst.dim;
  const size_t n = inst.points.size();

  std::vector<Vec> dirs;
  if (d == 1) {
    dirs = {Vec{1.0}, Vec{-1.0}};
  } else if (d == 2) {
    int m = std::max(4, direction_budget);
    for (int k = 0; k < m; ++k) {
      double th = 2.0 * M_PI * k / m;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    int m = std::max(8, direction_budget);
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < m; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / m;
      double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = ga * k;
      Vec v = {rad * std::cos(phi), rad * std::sin(phi), z};
      v.resize(static_cast<size_t>(d), 0.0);
      dirs.push_back(std::move(v));
    }
  }

  double best_loss = kInf;
  Hyperplane best_h{zeros(d), 1.0};

  auto consider = [&](const Hyperplane& h) {
    double loss = strategic_loss(h, inst, eta);
    if (loss < best_loss - 1e-15) {
      best_loss = loss;
      best_h = h;
    }
  };
  consider(Hyperplane{zeros(d), 1.0});   // constant +1
  consider(Hyperplane{zeros(d), -1.0});  // constant -1

  for (const auto& w : dirs) {
    std::vector<double> duals(n);
    bool degenerate = false;
    for (size_t i = 0; i < n; ++i) {
      duals[i] = dual_norm(inst.cost.seminorm_for(i), w);
      if (duals[i] == 0.0) degenerate = true;
    }
    if (degenerate) continue;
    std::vector<double> bs;
    for (size_t i = 0; i < n; ++i) {
      if (std::isinf(duals[i])) continue;
      bs.push_back(-dot(w, inst.points[i].x) - inst.points[i].r * duals[i]);
    }
    if (bs.empty()) bs.push_back(0.0);
    double span = 1.0;
    for (double b : bs) span = std::max(span, std::fabs(b));
    double delta = 1e-6 * span;
    std::vector<double> cands;
    for (double b : bs) {
      cands.push_back(b - delta);
      cands.push_back(b);
      cands.push_back(b + delta);
    }
    cands.push_back(*std::min_element(bs.begin(), bs.end()) - 2.0 * span);
    cands.push_back(*std::max_element(bs.begin(), bs.end()) + 2.0 * span);
    for (double b : cands) {
      size_t bad = 0;
      for (size_t i = 0; i < n; ++i) {
        int lab = best_response_label_dual(Hyperplane{w, b}, inst.points[i].x,
                                           inst.points[i].r, duals[i], eta);
        if (lab != inst.points[i].y) ++bad;
      }
      double loss = static_cast<double>(bad) / static_cast<double>(n);
      if (loss < best_loss - 1e-15) {
        best_loss = loss;
        best_h = Hyperplane{w, b};
      }
    }
  }

  SermSolution out;
  out.h = best_h;
  out.loss = best_loss;
  out.alpha = 1.0;
  out.status = best_loss == 0.0 ? SermStatus::Separated : SermStatus::Infeasible;
  out.certificate = check_solution(inst, best_h, eta);
  return out;
}

}  // namespace stratlearn
