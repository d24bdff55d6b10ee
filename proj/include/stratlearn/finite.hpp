#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "stratlearn/common.hpp"

namespace stratlearn {

// Finite strategic classification space: explicit features, an explicit
// hypothesis family as label tables, a cost table (with +inf allowed), and a
// finite preference set R.
struct FiniteStrategicSpace {
  int size = 0;
  Mat cost;                                // size x size
  std::vector<std::vector<int8_t>> family; // labels over the feature set
  Vec preference_set;

  void validate() const {
    if (static_cast<int>(cost.size()) != size)
      throw InvalidInput("FiniteStrategicSpace: cost table size");
    for (const auto& row : cost) {
      if (static_cast<int>(row.size()) != size)
        throw InvalidInput("FiniteStrategicSpace: cost row size");
      for (double c : row)
        if (c < 0.0) throw InvalidInput("FiniteStrategicSpace: negative cost");
    }
    for (int i = 0; i < size; ++i)
      if (cost[static_cast<size_t>(i)][static_cast<size_t>(i)] != 0.0)
        throw InvalidInput("FiniteStrategicSpace: c(x,x) must be 0");
    for (const auto& h : family)
      if (static_cast<int>(h.size()) != size)
        throw InvalidInput("FiniteStrategicSpace: family table size");
  }

  // exhaustive metric check (symmetry + triangle inequality)
  bool is_metric(double tol = 1e-9) const {
    for (int a = 0; a < size; ++a)
      for (int b = 0; b < size; ++b) {
        if (std::fabs(cost[static_cast<size_t>(a)][static_cast<size_t>(b)] -
                      cost[static_cast<size_t>(b)][static_cast<size_t>(a)]) > tol)
          return false;
        if (a != b && cost[static_cast<size_t>(a)][static_cast<size_t>(b)] <= tol) return false;
      }
    for (int a = 0; a < size; ++a)
      for (int b = 0; b < size; ++b)
        for (int c = 0; c < size; ++c)
          if (cost[static_cast<size_t>(a)][static_cast<size_t>(c)] >
              cost[static_cast<size_t>(a)][static_cast<size_t>(b)] +
                  cost[static_cast<size_t>(b)][static_cast<size_t>(c)] + tol)
            return false;
    return true;
  }
};

// Best response on a finite space: the agent compares the cheapest way to be
// labeled +1 against the cheapest way to be labeled -1 and breaks exact ties
// toward its preferred label (r = 0 stays at the raw label).
inline int finite_best_response_label(const std::vector<int8_t>& h, int x, double r,
                                      const Mat& cost) {
  double cp = kInf, cm = kInf;
  const auto& row = cost[static_cast<size_t>(x)];
  for (size_t z = 0; z < h.size(); ++z) {
    if (h[z] == 1)
      cp = std::min(cp, row[z]);
    else
      cm = std::min(cm, row[z]);
  }
  double up = r - cp;   // -inf when no positive cell exists
  double um = -cm;
  if (up > um + 1e-12) return 1;
  if (um > up + 1e-12) return -1;
  if (r > 0) return 1;
  if (r < 0) return -1;
  return h[static_cast<size_t>(x)];
}

struct ShatterReport {
  int n = 0;
  uint64_t sigma = 0;
  bool exact = true;
  // pattern bitmask (bit i set = point i labeled +1) -> witness family index
  std::vector<std::pair<uint32_t, int>> witnesses;
};

namespace detail {

// precomputed best-response labels: table[h][x][r_index]
inline std::vector<std::vector<std::vector<int8_t>>> response_table(
    const FiniteStrategicSpace& sp) {
  std::vector<std::vector<std::vector<int8_t>>> t(sp.family.size());
  for (size_t h = 0; h < sp.family.size(); ++h) {
    t[h].resize(static_cast<size_t>(sp.size));
    for (int x = 0; x < sp.size; ++x) {
      t[h][static_cast<size_t>(x)].resize(sp.preference_set.size());
      for (size_t ri = 0; ri < sp.preference_set.size(); ++ri)
        t[h][static_cast<size_t>(x)][ri] = static_cast<int8_t>(
            finite_best_response_label(sp.family[h], x, sp.preference_set[ri], sp.cost));
    }
  }
  return t;
}

template <class Fn>
void for_each_subset(int total, int n, Fn&& fn) {
  if (n > total || n <= 0) return;
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  while (true) {
    fn(idx);
    int k = n - 1;
    while (k >= 0 && idx[static_cast<size_t>(k)] == total - n + k) --k;
    if (k < 0) break;
    ++idx[static_cast<size_t>(k)];
    for (int j = k + 1; j < n; ++j)
      idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
}

}  // namespace detail

// Shattering coefficient for one concrete choice of points and preferences:
// the number of distinct best-response label tuples over the family.
inline ShatterReport shattering_coefficient(const FiniteStrategicSpace& sp,
                                            const std::vector<int>& points,
                                            const std::vector<int>& pref_idx) {
  const int n = static_cast<int>(points.size());
  if (n > 20) throw ResourceLimit("shattering_coefficient: n too large for exact bookkeeping");
  ShatterReport rep;
  rep.n = n;
  std::set<uint32_t> seen;
  for (size_t h = 0; h < sp.family.size(); ++h) {
    uint32_t pat = 0;
    for (int i = 0; i < n; ++i) {
      int lab = finite_best_response_label(
          sp.family[h], points[static_cast<size_t>(i)],
          sp.preference_set[static_cast<size_t>(pref_idx[static_cast<size_t>(i)])], sp.cost);
      if (lab == 1) pat |= 1u << i;
    }
    if (seen.insert(pat).second) rep.witnesses.push_back({pat, static_cast<int>(h)});
  }
  rep.sigma = seen.size();
  return rep;
}

// sigma_n: maximum over point subsets and preference assignments.
inline uint64_t sigma_n_exact(const FiniteStrategicSpace& sp, int n,
                              uint64_t work_budget = 500000000ull) {
  if (n > 20) throw ResourceLimit("sigma_n: n too large");
  const uint64_t nr = sp.preference_set.size();
  double combos = 1.0;
  for (int i = 0; i < n; ++i) combos *= static_cast<double>(sp.size - i) / (i + 1);
  double work = combos * std::pow(static_cast<double>(nr), n) *
                static_cast<double>(sp.family.size()) * n;
  if (work > static_cast<double>(work_budget)) throw ResourceLimit("sigma_n: work budget exceeded");

  auto table = detail::response_table(sp);
  uint64_t best = 0;
  const uint64_t full = 1ull << n;
  detail::for_each_subset(sp.size, n, [&](const std::vector<int>& idx) {
    if (best == full) return;
    std::vector<size_t> ri(static_cast<size_t>(n), 0);
    while (true) {
      std::set<uint32_t> seen;
      for (size_t h = 0; h < sp.family.size(); ++h) {
        uint32_t pat = 0;
        for (int i = 0; i < n; ++i)
          if (table[h][static_cast<size_t>(idx[static_cast<size_t>(i)])]
                   [ri[static_cast<size_t>(i)]] == 1)
            pat |= 1u << i;
        seen.insert(pat);
        if (seen.size() == full) break;
      }
      best = std::max<uint64_t>(best, seen.size());
      if (best == full) return;
      size_t k = 0;
      while (k < static_cast<size_t>(n) && ++ri[k] == nr) {
        ri[k] = 0;
        ++k;
      }
      if (k == static_cast<size_t>(n)) break;
    }
  });
  return best;
}

// SVC restricted to n <= n_max (exact on the supplied finite family).
inline int svc_finite(const FiniteStrategicSpace& sp, int n_max) {
  if (sp.family.empty()) return 0;
  int out = 0;
  for (int n = 1; n <= std::min(n_max, sp.size); ++n) {
    if (sigma_n_exact(sp, n) == (1ull << n))
      out = n;
    else
      break;
  }
  return out;
}

// Corrupted-classifier labels for the adversarial definition: h~(x) = h(x)
// when every z with c(x,z) <= r agrees with h(x), otherwise bottom (0).
inline std::vector<std::vector<int8_t>> corrupted_family(const FiniteStrategicSpace& sp,
                                                         double r) {
  std::vector<std::vector<int8_t>> out(sp.family.size());
  for (size_t h = 0; h < sp.family.size(); ++h) {
    out[h].resize(static_cast<size_t>(sp.size));
    for (int x = 0; x < sp.size; ++x) {
      int8_t hx = sp.family[h][static_cast<size_t>(x)];
      bool unanimous = true;
      for (int z = 0; z < sp.size && unanimous; ++z)
        if (sp.cost[static_cast<size_t>(x)][static_cast<size_t>(z)] <= r + 1e-12)
          unanimous &= sp.family[h][static_cast<size_t>(z)] == hx;
      out[h][static_cast<size_t>(x)] = unanimous ? hx : 0;
    }
  }
  return out;
}

// AVC with the nearness relation B = {(z;x) : c(z;x) <= r}, via loss-bit
// patterns of the corrupted classifiers (the max ranges over labels too).
inline int avc_finite(const FiniteStrategicSpace& sp, double r, int n_max = 8) {
  if (sp.family.empty()) return 0;
  auto corr = corrupted_family(sp, r);
  int out = 0;
  for (int n = 1; n <= std::min(n_max, sp.size); ++n) {
    const uint64_t full = 1ull << n;
    uint64_t best = 0;
    detail::for_each_subset(sp.size, n, [&](const std::vector<int>& idx) {
      if (best == full) return;
      for (uint32_t ymask = 0; ymask < full; ++ymask) {
        std::set<uint32_t> seen;
        for (size_t h = 0; h < sp.family.size(); ++h) {
          uint32_t pat = 0;
          for (int i = 0; i < n; ++i) {
            int y = (ymask >> i) & 1 ? 1 : -1;
            int8_t hx = corr[h][static_cast<size_t>(idx[static_cast<size_t>(i)])];
            if (hx != y) pat |= 1u << i;  // loss bit
          }
          seen.insert(pat);
          if (seen.size() == full) break;
        }
        best = std::max<uint64_t>(best, seen.size());
        if (best == full) return;
      }
    });
    if (best == full)
      out = n;
    else
      break;
  }
  return out;
}

// Plain VC dimension of the family over the feature set.
inline int classic_vc(const FiniteStrategicSpace& sp, int n_max = 8) {
  if (sp.family.empty()) return 0;
  int out = 0;
  for (int n = 1; n <= std::min(n_max, sp.size); ++n) {
    const uint64_t full = 1ull << n;
    uint64_t best = 0;
    detail::for_each_subset(sp.size, n, [&](const std::vector<int>& idx) {
      if (best == full) return;
      std::set<uint32_t> seen;
      for (const auto& h : sp.family) {
        uint32_t pat = 0;
        for (int i = 0; i < n; ++i)
          if (h[static_cast<size_t>(idx[static_cast<size_t>(i)])] == 1) pat |= 1u << i;
        seen.insert(pat);
        if (seen.size() == full) break;
      }
      best = std::max<uint64_t>(best, seen.size());
    });
    if (best == full)
      out = n;
    else
      break;
  }
  return out;
}

}  // namespace stratlearn
