#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stratlearn/common.hpp"
#include "stratlearn/serm.hpp"
#include "stratlearn/strategic.hpp"

namespace stratlearn {

// Empirical learning curve: train on n samples from a realizable separable
// population, evaluate the strategic loss on a large held-out draw from the
// same population, and repeat over seeds. One large instance is generated
// per seed and sliced, so train and test share the ground truth and cost.

struct LearningCurveConfig {
  std::vector<int> schedule = {10, 30, 100, 300};
  int seeds = 20;
  int test_n = 10000;
  int dim = 2;
  uint64_t base_seed = 20210501;
  double margin = 0.02;
  double spread = 3.0;
};

struct LearningCurveRow {
  int n = 0;
  double mean_loss = 0.0;
  double std_loss = 0.0;
};

struct LearningCurveResult {
  std::vector<LearningCurveRow> rows;
  Mat losses;  // [seed][schedule index]
  double spearman_rho = 0.0;
  double p_value = 1.0;
  int fallback_runs = 0;  // solver infeasible, brute-force loss recorded instead
};

namespace detail {

inline StrategicInstance slice_instance(const StrategicInstance& big, int n_pos_total,
                                        int pos_from, int pos_count, int neg_from,
                                        int neg_count) {
  StrategicInstance out;
  out.dim = big.dim;
  out.cost = CostModel::invariant(big.cost.seminorms[0]);
  out.meta = big.meta;
  for (int i = 0; i < pos_count; ++i)
    out.points.push_back(big.points[static_cast<size_t>(pos_from + i)]);
  for (int i = 0; i < neg_count; ++i)
    out.points.push_back(big.points[static_cast<size_t>(n_pos_total + neg_from + i)]);
  return out;
}

inline double spearman_rho(const Vec& xs, const Vec& ys) {
  auto ranks = [](const Vec& v) {
    std::vector<size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    Vec r(v.size());
    size_t i = 0;
    while (i < idx.size()) {
      size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  Vec rx = ranks(xs), ry = ranks(ys);
  double mx = 0, my = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(rx.size());
  my /= static_cast<double>(ry.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

inline LearningCurveResult run_learning_curve(const LearningCurveConfig& cfg) {
  if (cfg.schedule.empty() || cfg.seeds < 2)
    throw InvalidSpec("learning_curve: need a schedule and at least two seeds");
  int max_train = *std::max_element(cfg.schedule.begin(), cfg.schedule.end());
  const int pos_train_max = max_train / 2 + 1;
  const int neg_train_max = max_train - max_train / 2 + 1;
  const int pos_test = cfg.test_n / 2;
  const int neg_test = cfg.test_n - pos_test;

  LearningCurveResult res;
  res.losses.assign(static_cast<size_t>(cfg.seeds), Vec(cfg.schedule.size(), 0.0));

  for (int s = 0; s < cfg.seeds; ++s) {
    GeneratorConfig g;
    g.dim = cfg.dim;
    g.n_pos = pos_train_max + pos_test;
    g.n_neg = neg_train_max + neg_test;
    g.regime = Regime::EssentiallyAdversarial;
    g.cost = GeneratorConfig::Cost::L2Approx;
    g.separable = true;
    g.margin = cfg.margin;
    g.spread = cfg.spread;
    g.seed = cfg.base_seed + static_cast<uint64_t>(s);
    auto big = generate_instance(g);
    auto test = detail::slice_instance(big, g.n_pos, pos_train_max, pos_test, neg_train_max,
                                       neg_test);
    for (size_t ni = 0; ni < cfg.schedule.size(); ++ni) {
      int n = cfg.schedule[ni];
      auto train = detail::slice_instance(big, g.n_pos, 0, n / 2, 0, n - n / 2);
      Hyperplane h;
      auto sol = serm_invariant_essentially_adversarial(train);
      if (sol.status == SermStatus::Separated) {
        h = sol.h;
      } else {
        h = serm_bruteforce(train, 720).h;
        ++res.fallback_runs;
      }
      res.losses[static_cast<size_t>(s)][ni] = strategic_loss(h, test);
    }
  }

  Vec xs, ys;
  for (int s = 0; s < cfg.seeds; ++s)
    for (size_t ni = 0; ni < cfg.schedule.size(); ++ni) {
      xs.push_back(static_cast<double>(cfg.schedule[ni]));
      ys.push_back(res.losses[static_cast<size_t>(s)][ni]);
    }
  res.spearman_rho = detail::spearman_rho(xs, ys);

  // one-sided permutation test for a negative trend
  Rng rng(cfg.base_seed ^ 0x5eedULL);
  const int perms = 20000;
  int leq = 0;
  Vec shuffled = ys;
  for (int p = 0; p < perms; ++p) {
    for (size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.uniform_int(i)]);
    if (detail::spearman_rho(xs, shuffled) <= res.spearman_rho) ++leq;
  }
  res.p_value = static_cast<double>(leq + 1) / static_cast<double>(perms + 1);

  for (size_t ni = 0; ni < cfg.schedule.size(); ++ni) {
    LearningCurveRow row;
    row.n = cfg.schedule[ni];
    double m = 0.0;
    for (int s = 0; s < cfg.seeds; ++s) m += res.losses[static_cast<size_t>(s)][ni];
    m /= static_cast<double>(cfg.seeds);
    double v = 0.0;
    for (int s = 0; s < cfg.seeds; ++s) {
      double d = res.losses[static_cast<size_t>(s)][ni] - m;
      v += d * d;
    }
    row.mean_loss = m;
    row.std_loss = std::sqrt(v / static_cast<double>(std::max(1, cfg.seeds - 1)));
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace stratlearn
