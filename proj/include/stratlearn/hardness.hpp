#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "stratlearn/common.hpp"
#include "stratlearn/serm.hpp"
#include "stratlearn/strategic.hpp"

namespace stratlearn {

// Partition-instance machinery: strategic separable instances whose exact
// norm-maximization optimum encodes a balanced-subset question.

struct PartitionInput {
  std::vector<long long> c;
  double eps = 0.25;

  void validate() const {
    if (c.empty()) throw InvalidInput("PartitionInput: empty integer list");
    for (long long v : c)
      if (v < 1) throw InvalidInput("PartitionInput: integers must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("PartitionInput: eps must be in (0,1)");
  }
};

// n = 2d + 3 data points. Situation 1 uses the invariant l2 cost with
// preferences {4, 1-eps, 2, 2-eps}; situation 2 rescales the positive
// points' costs (beta * l2) so the same constraint set appears with
// preferences {0.5, 1-eps, 2-eps} and the instance is essentially
// adversarial under instance-wise costs.
inline StrategicInstance generate_partition_instance(const PartitionInput& pin, int situation) {
  pin.validate();
  if (situation != 1 && situation != 2)
    throw InvalidInput("generate_partition_instance: situation must be 1 or 2");
  const int d = static_cast<int>(pin.c.size());
  const double sq = std::sqrt(static_cast<double>(d));
  StrategicInstance inst;
  inst.dim = d;
  inst.meta.name = situation == 1 ? "partition-reduction-s1" : "partition-reduction-s2";
  inst.meta.preference_set = "reduction";

  Vec cvec(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) cvec[static_cast<size_t>(i)] = static_cast<double>(pin.c[static_cast<size_t>(i)]);

  std::vector<double> scale;  // per-point seminorm scale beta (situation 2)
  auto push = [&](Vec x, int y, double r, double beta) {
    inst.points.push_back(DataPoint{std::move(x), y, r});
    scale.push_back(beta);
  };
  for (int i = 0; i < d; ++i) {
    if (situation == 1) {
      push(unit(d, i, 2.0 * sq), 1, 4.0, 1.0);
      push(unit(d, i, sq), -1, 1.0 - pin.eps, 1.0);
    } else {
      push(unit(d, i, 2.0 * sq), 1, 0.5, 0.125);
      push(unit(d, i, sq), -1, 1.0 - pin.eps, 1.0);
    }
  }
  if (situation == 1) {
    push(cvec, 1, 2.0, 1.0);
    push(scaled(cvec, 2.0), -1, 2.0 - pin.eps, 1.0);
    push(scaled(cvec, 3.0), 1, 2.0, 1.0);
  } else {
    push(cvec, 1, 0.5, 0.25);
    push(scaled(cvec, 2.0), -1, 2.0 - pin.eps, 1.0);
    push(scaled(cvec, 3.0), 1, 0.5, 0.25);
  }

  if (situation == 1) {
    inst.cost = CostModel::invariant(Seminorm::l2(d));
  } else {
    std::vector<Seminorm> ls;
    for (double beta : scale) ls.push_back(Seminorm::lp(2.0, Vec(static_cast<size_t>(d), beta)));
    inst.cost = CostModel::instance_wise(std::move(ls));
  }
  inst.validate();
  return inst;
}

// The reduction's certificate: b* = -2, w_i = +1/sqrt(d) on S and -1/sqrt(d)
// off S. Accepts iff S balances the integers and (w*, b*) satisfies every
// separability constraint with ||w*||_2 = 1.
inline bool verify_yes_certificate(const StrategicInstance& inst, const std::vector<int>& subset,
                                   double tol = 1e-9) {
  const int d = inst.dim;
  if ((static_cast<int>(inst.points.size()) != 2 * d + 3))
    throw InvalidInput("verify_yes_certificate: not a reduction instance");
  std::vector<bool> in_s(static_cast<size_t>(d), false);
  for (int i : subset) {
    if (i < 1 || i > d) throw InvalidInput("verify_yes_certificate: subset index out of range");
    in_s[static_cast<size_t>(i - 1)] = true;
  }
  const Vec& cvec = inst.points[static_cast<size_t>(2 * d)].x;  // the (c, +1, .) point
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < d; ++i)
    (in_s[static_cast<size_t>(i)] ? lhs : rhs) += cvec[static_cast<size_t>(i)];
  if (std::fabs(lhs - rhs) > tol) return false;

  const double sq = std::sqrt(static_cast<double>(d));
  Hyperplane h;
  h.w.resize(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i)
    h.w[static_cast<size_t>(i)] = (in_s[static_cast<size_t>(i)] ? 1.0 : -1.0) / sq;
  h.b = -2.0;
  if (std::fabs(norm2(h.w) - 1.0) > tol) return false;
  // every separability branch must hold: the instance is built so these are
  // the System-(5) cases evaluated through each point's own seminorm
  for (const auto& e : check_solution(inst, h))
    if (!e.pass) return false;
  return true;
}

// Meet-in-the-middle balanced-subset search (exact for d <= 24). Returns a
// subset (1-based indices) with sum = total/2, or nothing.
inline std::optional<std::vector<int>> solve_partition_exact(const PartitionInput& pin) {
  pin.validate();
  const int d = static_cast<int>(pin.c.size());
  if (d > 24) throw ResourceLimit("solve_partition_exact: d > 24");
  long long total = 0;
  for (long long v : pin.c) total += v;
  if (total % 2 != 0) return std::nullopt;
  const long long half = total / 2;

  const int d1 = d / 2, d2 = d - d1;
  std::vector<std::pair<long long, uint32_t>> left;
  left.reserve(1u << d1);
  for (uint32_t m = 0; m < (1u << d1); ++m) {
    long long s = 0;
    for (int i = 0; i < d1; ++i)
      if ((m >> i) & 1) s += pin.c[static_cast<size_t>(i)];
    left.push_back({s, m});
  }
  std::sort(left.begin(), left.end());
  for (uint32_t m = 0; m < (1u << d2); ++m) {
    long long s = 0;
    for (int i = 0; i < d2; ++i)
      if ((m >> i) & 1) s += pin.c[static_cast<size_t>(d1 + i)];
    long long need = half - s;
    auto it = std::lower_bound(left.begin(), left.end(),
                               std::make_pair(need, static_cast<uint32_t>(0)));
    if (it != left.end() && it->first == need) {
      std::vector<int> subset;
      for (int i = 0; i < d1; ++i)
        if ((it->second >> i) & 1) subset.push_back(i + 1);
      for (int i = 0; i < d2; ++i)
        if ((m >> i) & 1) subset.push_back(d1 + i + 1);
      return subset;
    }
  }
  return std::nullopt;
}

// Exact optimum of the norm-maximization program on a reduction instance.
// The c-point triple forces c.w = 0 and b = -2, and the axis points force
// |w_i| <= 1/sqrt(d); maximizing ||w||_2^2 over that box-slice is attained
// at a vertex, which fixes all but one coordinate at the bounds. These
// structural facts are asserted numerically on the instance before use.
inline double op9_exact_small(const StrategicInstance& inst) {
  const int d = inst.dim;
  if (d > 12) throw ResourceLimit("op9_exact_small: d > 12");
  if (static_cast<int>(inst.points.size()) != 2 * d + 3)
    throw InvalidInput("op9_exact_small: not a reduction instance");
  const double sq = std::sqrt(static_cast<double>(d));
  // assert the generator's structure instead of trusting it
  const Vec& cvec = inst.points[static_cast<size_t>(2 * d)].x;
  for (int i = 0; i < d; ++i) {
    const auto& ax_pos = inst.points[static_cast<size_t>(2 * i)];
    const auto& ax_neg = inst.points[static_cast<size_t>(2 * i + 1)];
    if (std::fabs(ax_pos.x[static_cast<size_t>(i)] - 2.0 * sq) > 1e-9 ||
        std::fabs(ax_neg.x[static_cast<size_t>(i)] - sq) > 1e-9)
      throw InvalidInput("op9_exact_small: axis points malformed");
    if (cvec[static_cast<size_t>(i)] < 1.0)
      throw InvalidInput("op9_exact_small: c entries must be positive integers");
  }
  const auto& c2x = inst.points[static_cast<size_t>(2 * d + 1)].x;
  const auto& c3x = inst.points[static_cast<size_t>(2 * d + 2)].x;
  for (int i = 0; i < d; ++i) {
    if (std::fabs(c2x[static_cast<size_t>(i)] - 2.0 * cvec[static_cast<size_t>(i)]) > 1e-9 ||
        std::fabs(c3x[static_cast<size_t>(i)] - 3.0 * cvec[static_cast<size_t>(i)]) > 1e-9)
      throw InvalidInput("op9_exact_small: c-multiple points malformed");
  }

  const double bound = 1.0 / sq;
  double best = 0.0;
  // vertices of { |w_i| <= bound } cut by { c.w = 0 }: all coordinates at a
  // bound except (at most) one determined by the hyperplane
  for (uint32_t mask = 0; mask < (1u << d); ++mask) {
    double cw = 0.0;
    for (int i = 0; i < d; ++i)
      cw += (((mask >> i) & 1) ? bound : -bound) * cvec[static_cast<size_t>(i)];
    if (std::fabs(cw) < 1e-9) return 1.0;  // a full-length sign pattern fits
    for (int j = 0; j < d; ++j) {
      double partial = 0.0;
      for (int i = 0; i < d; ++i) {
        if (i == j) continue;
        partial += (((mask >> i) & 1) ? bound : -bound) * cvec[static_cast<size_t>(i)];
      }
      double wj = -partial / cvec[static_cast<size_t>(j)];
      if (std::fabs(wj) > bound + 1e-12) continue;
      double val = static_cast<double>(d - 1) * bound * bound + wj * wj;
      best = std::max(best, val);
    }
  }
  return std::min(best, 1.0);
}

}  // namespace stratlearn
