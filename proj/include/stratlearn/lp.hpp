#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "stratlearn/common.hpp"

namespace stratlearn {

// Self-contained dense LP solver. Compact-dictionary simplex with Bland's
// rule for both phases, so pivoting is deterministic and cannot cycle.
// Problem sizes here are desk-scale (tens of structural variables, a few
// thousand rows), which a dense tableau handles comfortably.

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct LpRow {
  Vec coeffs;
  char rel;  // 'L' (<=), 'G' (>=), 'E' (==)
  double rhs;
};

struct LinearProgram {
  int nvars = 0;
  bool maximize = true;
  Vec objective;               // empty => pure feasibility problem
  std::vector<LpRow> rows;
  std::vector<bool> nonneg;    // per-variable; empty => all variables free

  LpRow& add_row(Vec a, char rel, double rhs) {
    rows.push_back(LpRow{std::move(a), rel, rhs});
    return rows.back();
  }
};

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  Vec x;
  double objective = 0.0;
};

namespace detail {

// Dictionary simplex for: maximize c.x  s.t.  A x <= b,  x >= 0.
class DenseSimplex {
 public:
  DenseSimplex(const Mat& A, const Vec& b, const Vec& c)
      : m_(static_cast<int>(A.size())), n_(static_cast<int>(c.size())) {
    N_.resize(n_ + 1);
    B_.resize(m_);
    D_.assign(m_ + 2, Vec(n_ + 2, 0.0));
    for (int i = 0; i < m_; ++i) {
      B_[i] = n_ + i;  // slack labels
      for (int j = 0; j < n_; ++j) D_[i][j] = A[i][j];
      D_[i][n_] = -1.0;  // auxiliary column
      D_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      N_[j] = j;
      D_[m_][j] = -c[j];
    }
    N_[n_] = aux_label();
    D_[m_ + 1][n_] = 1.0;  // phase-1 objective: maximize -x_aux
  }

  LpStatus run() {
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
    if (D_[r][n_ + 1] < -kFeasTol) {
      pivot(r, n_);  // bring the auxiliary variable into the basis
      if (!simplex(1)) return LpStatus::NumericalFailure;
      if (D_[m_ + 1][n_ + 1] < -kFeasTol) return LpStatus::Infeasible;
      // Drive the auxiliary variable out of the basis if it still sits there.
      for (int i = 0; i < m_; ++i) {
        if (B_[i] == aux_label()) {
          int s = -1;
          for (int j = 0; j <= n_; ++j) {
            if (N_[j] == aux_label()) continue;
            if (std::fabs(D_[i][j]) > kPivTol && (s == -1 || N_[j] < N_[s])) s = j;
          }
          if (s >= 0) pivot(i, s);
          // else: the row is identically zero over real columns; inert.
          break;
        }
      }
    }
    if (!simplex(2)) {
      return exceeded_ ? LpStatus::NumericalFailure : LpStatus::Unbounded;
    }
    return LpStatus::Optimal;
  }

  double objective_value() const { return D_[m_][n_ + 1]; }

  Vec extract(int nvars) const {
    Vec x(static_cast<size_t>(nvars), 0.0);
    for (int i = 0; i < m_; ++i)
      if (B_[i] < nvars) x[static_cast<size_t>(B_[i])] = D_[i][n_ + 1];
    return x;
  }

 private:
  int aux_label() const { return n_ + m_; }

  void pivot(int r, int s) {
    const double inv = 1.0 / D_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::fabs(D_[i][s]) <= kPivTol) {
        if (i != r) D_[i][s] = 0.0;
        continue;
      }
      const double f = D_[i][s] * inv;
      for (int j = 0; j <= n_ + 1; ++j) D_[i][j] -= f * D_[r][j];
      D_[i][s] = -f;
    }
    for (int j = 0; j <= n_ + 1; ++j)
      if (j != s) D_[r][j] *= inv;
    D_[r][s] = inv;
    std::swap(B_[r], N_[s]);
  }

  // Bland's rule: entering = admissible column with the smallest variable
  // label; leaving = smallest ratio, ties broken by smallest basic label.
  bool simplex(int phase) {
    const int obj = (phase == 1) ? m_ + 1 : m_;
    while (true) {
      if (++iters_ > kMaxIters) {
        exceeded_ = true;
        return false;
      }
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && N_[j] == aux_label()) continue;
        if (D_[obj][j] < -kPivTol && (s == -1 || N_[j] < N_[s])) s = j;
      }
      if (s == -1) return true;
      int r = -1;
      double best = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (D_[i][s] <= kPivTol) continue;
        double ratio = D_[i][n_ + 1] / D_[i][s];
        if (r == -1 || ratio < best - kPivTol ||
            (ratio < best + kPivTol && B_[i] < B_[r])) {
          r = i;
          best = ratio;
        }
      }
      if (r == -1) return false;  // unbounded (phase 2)
      pivot(r, s);
    }
  }

  static constexpr double kPivTol = 1e-10;
  static constexpr double kFeasTol = 1e-8;
  static constexpr long kMaxIters = 2000000;

  int m_, n_;
  std::vector<int> N_, B_;
  Mat D_;
  long iters_ = 0;
  bool exceeded_ = false;
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp) {
  const int nv = lp.nvars;
  for (const auto& row : lp.rows) {
    if (static_cast<int>(row.coeffs.size()) != nv)
      throw InvalidInput("solve_lp: row dimension mismatch");
    if (!all_finite(row.coeffs) || !std::isfinite(row.rhs))
      throw InvalidInput("solve_lp: non-finite entry");
  }
  if (!lp.objective.empty() && static_cast<int>(lp.objective.size()) != nv)
    throw InvalidInput("solve_lp: objective dimension mismatch");

  // Column layout: free variables are split x = u - v.
  std::vector<int> col_of(static_cast<size_t>(nv));
  std::vector<bool> split(static_cast<size_t>(nv));
  int ncols = 0;
  for (int j = 0; j < nv; ++j) {
    bool nn = !lp.nonneg.empty() && lp.nonneg[static_cast<size_t>(j)];
    col_of[static_cast<size_t>(j)] = ncols;
    split[static_cast<size_t>(j)] = !nn;
    ncols += nn ? 1 : 2;
  }

  Mat A;
  Vec b;
  auto push = [&](const Vec& coeffs, double rhs, double sign) {
    Vec row(static_cast<size_t>(ncols), 0.0);
    for (int j = 0; j < nv; ++j) {
      double v = sign * coeffs[static_cast<size_t>(j)];
      row[static_cast<size_t>(col_of[static_cast<size_t>(j)])] = v;
      if (split[static_cast<size_t>(j)])
        row[static_cast<size_t>(col_of[static_cast<size_t>(j)] + 1)] = -v;
    }
    A.push_back(std::move(row));
    b.push_back(sign * rhs);
  };
  for (const auto& row : lp.rows) {
    if (row.rel == 'L' || row.rel == 'E') push(row.coeffs, row.rhs, 1.0);
    if (row.rel == 'G' || row.rel == 'E') push(row.coeffs, row.rhs, -1.0);
    if (row.rel != 'L' && row.rel != 'G' && row.rel != 'E')
      throw InvalidInput("solve_lp: unknown relation");
  }

  Vec c(static_cast<size_t>(ncols), 0.0);
  if (!lp.objective.empty()) {
    double sgn = lp.maximize ? 1.0 : -1.0;
    for (int j = 0; j < nv; ++j) {
      double v = sgn * lp.objective[static_cast<size_t>(j)];
      c[static_cast<size_t>(col_of[static_cast<size_t>(j)])] = v;
      if (split[static_cast<size_t>(j)])
        c[static_cast<size_t>(col_of[static_cast<size_t>(j)] + 1)] = -v;
    }
  }

  detail::DenseSimplex core(A, b, c);
  LpSolution out;
  out.status = core.run();
  if (out.status != LpStatus::Optimal) return out;

  Vec raw = core.extract(ncols);
  out.x.assign(static_cast<size_t>(nv), 0.0);
  for (int j = 0; j < nv; ++j) {
    double v = raw[static_cast<size_t>(col_of[static_cast<size_t>(j)])];
    if (split[static_cast<size_t>(j)])
      v -= raw[static_cast<size_t>(col_of[static_cast<size_t>(j)] + 1)];
    out.x[static_cast<size_t>(j)] = v;
  }
  out.objective = 0.0;
  if (!lp.objective.empty()) out.objective = dot(lp.objective, out.x);
  return out;
}

}  // namespace stratlearn
