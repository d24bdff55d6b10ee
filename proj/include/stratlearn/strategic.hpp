#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stratlearn/common.hpp"
#include "stratlearn/seminorm.hpp"

namespace stratlearn {

// A labeled point with its preference r for the positive label. The reward
// for label -1 is normalized to 0, so negative r means the point prefers -1.
struct DataPoint {
  Vec x;
  int y = 1;      // in {-1, +1}
  double r = 0.0;
};

enum class CostKind { Invariant, InstanceWise, Separable, ZeroCostRegion };

struct CostModel {
  CostKind kind = CostKind::Invariant;
  std::vector<Seminorm> seminorms;         // 1 (invariant) or one per point
  std::vector<Vec> samples;                // finite sample space (separable / zero-cost)
  Vec c1, c2;                              // separable tables over samples
  std::vector<std::vector<int>> regions;   // zero-cost feasible sample indices per point

  static CostModel invariant(Seminorm l) {
    CostModel cm;
    cm.kind = CostKind::Invariant;
    cm.seminorms.push_back(std::move(l));
    return cm;
  }

  static CostModel instance_wise(std::vector<Seminorm> ls) {
    if (ls.empty()) throw InvalidInput("CostModel::instance_wise: no seminorms");
    CostModel cm;
    cm.kind = CostKind::InstanceWise;
    cm.seminorms = std::move(ls);
    return cm;
  }

  static CostModel separable(std::vector<Vec> samples, Vec c1, Vec c2) {
    if (samples.empty() || c1.size() != samples.size() || c2.size() != samples.size())
      throw InvalidInput("CostModel::separable: table sizes mismatch");
    for (size_t i = 0; i < samples.size(); ++i)
      if (c2[i] > c1[i] + 1e-12)
        throw InvalidInput("CostModel::separable: c2(x) <= c1(x) must hold (c(x;x)=0)");
    CostModel cm;
    cm.kind = CostKind::Separable;
    cm.samples = std::move(samples);
    cm.c1 = std::move(c1);
    cm.c2 = std::move(c2);
    return cm;
  }

  static CostModel zero_cost(std::vector<Vec> samples, std::vector<std::vector<int>> regions) {
    CostModel cm;
    cm.kind = CostKind::ZeroCostRegion;
    cm.samples = std::move(samples);
    cm.regions = std::move(regions);
    return cm;
  }

  bool seminorm_induced() const {
    return kind == CostKind::Invariant || kind == CostKind::InstanceWise;
  }

  const Seminorm& seminorm_for(size_t i) const {
    if (kind == CostKind::Invariant) return seminorms[0];
    if (kind == CostKind::InstanceWise) {
      if (i >= seminorms.size())
        throw InvalidInput("CostModel: missing instance-wise seminorm");
      return seminorms[i];
    }
    throw InvalidInput("CostModel: cost is not seminorm-induced");
  }
};

struct InstanceMeta {
  std::string name;
  uint64_t seed = 0;
  std::string preference_set;     // descriptor of R
  bool has_ground_truth = false;
  Hyperplane ground_truth;
};

struct StrategicInstance {
  int dim = 0;
  CostModel cost;
  std::vector<DataPoint> points;
  InstanceMeta meta;

  size_t size() const { return points.size(); }

  void validate() const {
    for (const auto& p : points) {
      if (static_cast<int>(p.x.size()) != dim || !all_finite(p.x) || !std::isfinite(p.r))
        throw InvalidInput("StrategicInstance: bad point");
      if (p.y != 1 && p.y != -1) throw InvalidInput("StrategicInstance: label must be +-1");
    }
    if (cost.kind == CostKind::InstanceWise && cost.seminorms.size() != points.size())
      throw InvalidInput("StrategicInstance: instance-wise cost must cover every point");
    if (cost.kind == CostKind::ZeroCostRegion) {
      if (cost.regions.size() != points.size())
        throw InvalidInput("StrategicInstance: zero-cost regions must cover every point");
      for (const auto& reg : cost.regions)
        for (int idx : reg)
          if (idx < 0 || idx >= static_cast<int>(cost.samples.size()))
            throw InvalidInput("StrategicInstance: region index out of range");
    }
  }
};

inline int predict_raw(const Hyperplane& h, const Vec& x, double eta = kEta) {
  return dot(h.w, x) + h.b >= -eta ? 1 : -1;
}

// Best-response label under a seminorm cost with the dual value already in
// hand. Unified rule: +1 iff (w.x+b)/l*(w) >= -r (boundary positive, agent
// crosses on exact ties). An infinite dual means the kernel makes crossing
// free, so every point lands on its preferred side.
inline int best_response_label_dual(const Hyperplane& h, const Vec& x, double r,
                                    double dual, double eta = kEta) {
  if (h.is_constant()) return predict_raw(h, x, eta);
  if (dual == 0.0)
    throw DegenerateDirection("best_response: l*(w) = 0 with nonzero w");
  if (std::isinf(dual)) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return predict_raw(h, x, eta);
  }
  double s = (dot(h.w, x) + h.b) / dual;
  return s >= -r - eta ? 1 : -1;
}

inline int best_response_label(const Hyperplane& h, const DataPoint& p, const Seminorm& l,
                               double eta = kEta) {
  if (h.is_constant()) return predict_raw(h, p.x, eta);
  return best_response_label_dual(h, p.x, p.r, dual_norm(l, h.w), eta);
}

struct BestResponse {
  int label = 1;
  Vec z;
  double cost = 0.0;
  double utility = 0.0;
  bool moved = false;
};

// A cost-minimizing manipulated feature achieving the best-response label:
// x itself when no beneficial move exists, otherwise the point reached by
// walking the dual-norm maximizer onto the hyperplane (crossings to the
// negative side get a small extra step, since the boundary is positive).
inline BestResponse best_response_point(const Hyperplane& h, const DataPoint& p,
                                        const Seminorm& l, double eta = kEta) {
  BestResponse br;
  br.z = p.x;
  if (h.is_constant()) {
    br.label = predict_raw(h, p.x, eta);
    br.utility = p.r * (br.label == 1 ? 1.0 : 0.0);
    return br;
  }
  DualResult d = dual_norm_witness(l, h.w);
  br.label = best_response_label_dual(h, p.x, p.r, d.value, eta);
  int raw = predict_raw(h, p.x, eta);
  if (br.label == raw) {
    br.utility = p.r * (br.label == 1 ? 1.0 : 0.0);
    return br;
  }
  double v = dot(h.w, p.x) + h.b;
  if (std::isinf(d.value)) {
    // slide along the kernel until the sign matches; zero cost
    Vec k;
    double wk = 0.0;
    for (const auto& kb : l.kernel) {
      double t = dot(h.w, kb);
      if (std::fabs(t) > std::fabs(wk)) {
        wk = t;
        k = kb;
      }
    }
    if (k.empty()) throw DegenerateDirection("best_response_point: no kernel direction");
    double target = br.label == 1 ? 0.0 : -10.0 * eta * std::max(1.0, std::fabs(v));
    br.z = p.x;
    axpy(br.z, (target - v) / wk, k);
    br.cost = 0.0;
    br.moved = true;
    br.utility = p.r * (br.label == 1 ? 1.0 : 0.0);
    return br;
  }
  if (!d.has_maximizer)
    throw InvalidInput("best_response_point: dual maximizer unavailable");
  double dist = std::fabs(v) / d.value;
  if (br.label == 1) {
    // land exactly on the boundary, which is classified positive
    br.z = p.x;
    axpy(br.z, dist, d.maximizer);
    br.moved = true;
    br.cost = eval_seminorm(l, sub(br.z, p.x));
    br.utility = p.r - br.cost;
    return br;
  }
  // crossing to the open negative side: step past the boundary, keeping the
  // total cost strictly under |r|
  double slack = std::fabs(p.r) - dist;
  double delta = std::min(slack / 2.0, std::max(2.0 * eta, 1e-7) / d.value);
  br.z = p.x;
  axpy(br.z, -(dist + delta), d.maximizer);
  br.moved = true;
  br.cost = eval_seminorm(l, sub(br.z, p.x));
  br.utility = -br.cost;
  return br;
}

// Empirical strategic 0-1 loss: fraction of points whose best-response label
// disagrees with the true label.
inline double strategic_loss(const Hyperplane& h, const StrategicInstance& inst,
                             double eta = kEta) {
  if (inst.points.empty()) throw InvalidInput("strategic_loss: empty instance");
  if (!inst.cost.seminorm_induced())
    throw InvalidInput("strategic_loss: requires a seminorm cost model");
  double dual_shared = 0.0;
  bool invariant = inst.cost.kind == CostKind::Invariant;
  if (invariant && !h.is_constant()) dual_shared = dual_norm(inst.cost.seminorms[0], h.w);
  int bad = 0;
  for (size_t i = 0; i < inst.points.size(); ++i) {
    const auto& p = inst.points[i];
    int lab;
    if (h.is_constant()) {
      lab = predict_raw(h, p.x, eta);
    } else {
      double dual = invariant ? dual_shared : dual_norm(inst.cost.seminorm_for(i), h.w);
      lab = best_response_label_dual(h, p.x, p.r, dual, eta);
    }
    if (lab != p.y) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(inst.points.size());
}

// Best response over a finite sample space with a separable cost
// c(z;x) = max{c2(z) - c1(x), 0}: keep the label if it already matches
// sgn(r); otherwise flip iff the adversarial region
// N(x,r) = { z : c2(z) <= c1(x) + |r| } contains a point labeled sgn(r).
inline int separable_best_response_label(const std::vector<int8_t>& h_labels, int x_idx,
                                         double r, const Vec& c1, const Vec& c2) {
  int hx = h_labels[static_cast<size_t>(x_idx)];
  if (r == 0.0) return hx;
  int want = r > 0 ? 1 : -1;
  if (hx == want) return hx;
  double budget = c1[static_cast<size_t>(x_idx)] + std::fabs(r);
  for (size_t z = 0; z < c2.size(); ++z)
    if (c2[z] <= budget + 1e-12 && h_labels[z] == want) return want;
  return hx;
}

enum class Regime { Adversarial, EssentiallyAdversarial, General };

struct PreferenceRegime {
  Regime regime = Regime::General;
  double min_minus = kInf;   // min r over y = -1
  double max_plus = -kInf;   // max r over y = +1
};

inline PreferenceRegime classify_regime(const StrategicInstance& inst) {
  PreferenceRegime out;
  for (const auto& p : inst.points) {
    if (p.y == -1) out.min_minus = std::min(out.min_minus, p.r);
    if (p.y == 1) out.max_plus = std::max(out.max_plus, p.r);
  }
  if (out.min_minus >= 0.0 && 0.0 >= out.max_plus)
    out.regime = Regime::Adversarial;
  else if (out.min_minus >= out.max_plus)
    out.regime = Regime::EssentiallyAdversarial;
  else
    out.regime = Regime::General;
  return out;
}

// ---------------------------------------------------------------------------
// Instance generation

struct GeneratorConfig {
  int dim = 2;
  int n_pos = 10;
  int n_neg = 10;
  Regime regime = Regime::EssentiallyAdversarial;
  enum class Cost { L1, L2Approx, Linf, RandomPolytope } cost = Cost::L2Approx;
  bool instance_wise = false;
  bool separable = true;
  double margin = 0.2;
  double spread = 3.0;
  double r_scale = 2.0;
  uint64_t seed = 0;
  int l2_vertices_2d = 256;
  int l2_refine_3d = 2;
  int iw_l2_vertices_2d = 64;   // per-point cap for instance-wise duals
  int iw_l2_refine_3d = 1;
  int polytope_vertices = 12;
  std::string name = "generated";
};

namespace detail {

inline Seminorm sample_cost_seminorm(const GeneratorConfig& cfg, Rng& rng) {
  const int d = cfg.dim;
  Vec w(static_cast<size_t>(d));
  for (auto& a : w) a = rng.uniform(0.6, 1.8);
  switch (cfg.cost) {
    case GeneratorConfig::Cost::L1:
      return Seminorm::lp(1.0, w);
    case GeneratorConfig::Cost::Linf:
      return Seminorm::lp(kInf, w);
    case GeneratorConfig::Cost::L2Approx:
      return Seminorm::l2_polytope(w,
                                   cfg.instance_wise ? cfg.iw_l2_vertices_2d : cfg.l2_vertices_2d,
                                   cfg.instance_wise ? cfg.iw_l2_refine_3d : cfg.l2_refine_3d);
    case GeneratorConfig::Cost::RandomPolytope: {
      // symmetric points on a random ellipse/ellipsoid, so every listed
      // vertex is extreme
      std::vector<Vec> verts;
      if (d == 1) {
        double a = rng.uniform(0.7, 1.6);
        verts = {Vec{a}, Vec{-a}};
      } else {
        Vec axes(static_cast<size_t>(d));
        for (auto& a : axes) a = rng.uniform(0.7, 1.6);
        int half = std::max(d + 1, cfg.polytope_vertices / 2);
        for (int k = 0; k < half; ++k) {
          Vec u = rng.unit_direction(d);
          for (int i = 0; i < d; ++i) u[static_cast<size_t>(i)] *= axes[static_cast<size_t>(i)];
          verts.push_back(u);
          verts.push_back(scaled(u, -1.0));
        }
      }
      return Seminorm::polytope(std::move(verts));
    }
  }
  throw InvalidSpec("generate_instance: unknown cost kind");
}

inline std::pair<int, double> sample_label_pref(const GeneratorConfig& cfg, Rng& rng, bool pos,
                                                double shift) {
  int y = pos ? 1 : -1;
  double r = 0.0;
  switch (cfg.regime) {
    case Regime::Adversarial:
      r = pos ? -rng.uniform(0.0, cfg.r_scale) : rng.uniform(0.0, cfg.r_scale);
      break;
    case Regime::EssentiallyAdversarial:
      r = pos ? shift - rng.uniform(0.0, cfg.r_scale) : shift + rng.uniform(0.0, cfg.r_scale);
      break;
    case Regime::General:
      r = rng.uniform(-cfg.r_scale, cfg.r_scale);
      break;
  }
  return {y, r};
}

}  // namespace detail

// Deterministic for a fixed seed. Separable instances are built around an
// explicit ground-truth hyperplane: each point is placed along its own dual
// maximizer at a signed cost-distance that satisfies its branch of the
// separability system with at least `margin` slack. The ground truth is
// embedded in the metadata.
inline StrategicInstance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.dim < 1 || cfg.dim > 8) throw InvalidSpec("generate_instance: bad dimension");
  if (cfg.n_pos + cfg.n_neg < 1) throw InvalidSpec("generate_instance: no points");
  if (cfg.separable && cfg.margin <= 0.0)
    throw InvalidSpec("generate_instance: separable instances need a positive margin");
  if (cfg.r_scale < 0.0) throw InvalidSpec("generate_instance: negative r_scale");

  Rng rng(cfg.seed);
  StrategicInstance inst;
  inst.dim = cfg.dim;
  inst.meta.name = cfg.name;
  inst.meta.seed = cfg.seed;

  const int n = cfg.n_pos + cfg.n_neg;
  double shift = rng.uniform(-0.5 * cfg.r_scale, 0.5 * cfg.r_scale);

  std::vector<Seminorm> ls;
  if (cfg.instance_wise) {
    ls.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ls.push_back(detail::sample_cost_seminorm(cfg, rng));
  } else {
    ls.push_back(detail::sample_cost_seminorm(cfg, rng));
  }

  Vec w0 = rng.unit_direction(cfg.dim);
  double b0 = rng.uniform(-1.0, 1.0);

  inst.points.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    bool pos = i < cfg.n_pos;
    auto [y, r] = detail::sample_label_pref(cfg, rng, pos, shift);
    DataPoint p;
    p.y = y;
    p.r = r;
    if (cfg.separable) {
      const Seminorm& l = cfg.instance_wise ? ls[static_cast<size_t>(i)] : ls[0];
      DualResult d = dual_norm_witness(l, w0);
      if (!std::isfinite(d.value) || d.value <= 0.0 || !d.has_maximizer)
        throw InvalidSpec("generate_instance: cost degenerate along ground truth");
      double rho = pos ? -r + cfg.margin + rng.uniform(0.0, cfg.spread)
                       : -r - cfg.margin - rng.uniform(0.0, cfg.spread);
      Vec t(static_cast<size_t>(cfg.dim));
      for (auto& x : t) x = rng.uniform(-cfg.spread, cfg.spread);
      axpy(t, -dot(w0, t), w0);  // tangential component only (w0 is unit)
      Vec base = scaled(w0, -b0);
      p.x = add(base, t);
      axpy(p.x, rho, d.maximizer);  // maximizer sits on the ball: cost-distance = rho
    } else {
      p.x.resize(static_cast<size_t>(cfg.dim));
      for (auto& x : p.x) x = rng.uniform(-cfg.spread, cfg.spread);
    }
    inst.points.push_back(std::move(p));
  }

  inst.cost = cfg.instance_wise ? CostModel::instance_wise(std::move(ls))
                                : CostModel::invariant(std::move(ls[0]));
  inst.meta.has_ground_truth = true;
  inst.meta.ground_truth = Hyperplane{w0, b0};
  if (!cfg.separable) inst.meta.has_ground_truth = false;
  switch (cfg.regime) {
    case Regime::Adversarial: inst.meta.preference_set = "adversarial"; break;
    case Regime::EssentiallyAdversarial: inst.meta.preference_set = "essentially-adversarial"; break;
    case Regime::General: inst.meta.preference_set = "general"; break;
  }
  inst.validate();
  return inst;
}

// Per-point audit row for the CSV export.
struct AuditRow {
  int index = 0;
  int raw_label = 0;
  int br_label = 0;
  double signed_distance = 0.0;
  bool moved = false;
  double cost_spent = 0.0;
};

inline std::vector<AuditRow> audit_rows(const Hyperplane& h, const StrategicInstance& inst,
                                        double eta = kEta) {
  if (!inst.cost.seminorm_induced())
    throw InvalidInput("audit_rows: requires a seminorm cost model");
  std::vector<AuditRow> rows;
  rows.reserve(inst.points.size());
  for (size_t i = 0; i < inst.points.size(); ++i) {
    const auto& p = inst.points[i];
    const Seminorm& l = inst.cost.seminorm_for(i);
    AuditRow row;
    row.index = static_cast<int>(i);
    row.raw_label = predict_raw(h, p.x, eta);
    BestResponse br = best_response_point(h, p, l, eta);
    row.br_label = br.label;
    row.moved = br.moved;
    row.cost_spent = br.cost;
    if (h.is_constant()) {
      row.signed_distance = row.raw_label > 0 ? kInf : -kInf;
    } else {
      double dual = dual_norm(l, h.w);
      row.signed_distance =
          std::isinf(dual) ? 0.0 : (dot(h.w, p.x) + h.b) / dual;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace stratlearn
