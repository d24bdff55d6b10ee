#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratlearn {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline constexpr double kEta = 1e-9;        // sign-decision tolerance at boundaries
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& m) : std::runtime_error(m) {}
};
struct InvalidSpec : std::runtime_error {
  explicit InvalidSpec(const std::string& m) : std::runtime_error(m) {}
};
struct RegimeViolation : std::runtime_error {
  explicit RegimeViolation(const std::string& m) : std::runtime_error(m) {}
};
struct ResourceLimit : std::runtime_error {
  explicit ResourceLimit(const std::string& m) : std::runtime_error(m) {}
};
struct DegenerateDirection : std::runtime_error {
  explicit DegenerateDirection(const std::string& m) : std::runtime_error(m) {}
};

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("dot: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("sub: dimension mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("add: dimension mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec scaled(const Vec& a, double t) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
  return r;
}

// r += t * a
inline void axpy(Vec& r, double t, const Vec& a) {
  for (size_t i = 0; i < a.size(); ++i) r[i] += t * a[i];
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

inline Vec zeros(int d) { return Vec(static_cast<size_t>(d), 0.0); }

inline Vec unit(int d, int i, double v = 1.0) {
  Vec e = zeros(d);
  e[static_cast<size_t>(i)] = v;
  return e;
}

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Deterministic RNG. std::mt19937_64 output is bit-exact across platforms;
// we derive doubles ourselves instead of going through std distributions,
// whose results are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  uint64_t uniform_int(uint64_t n) {
    // modulo-rejection to avoid bias
    uint64_t lim = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= lim);
    return x % n;
  }

  double normal() {
    // Box-Muller; cache the second deviate
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

  Vec unit_direction(int d) {
    Vec v(static_cast<size_t>(d));
    double n = 0.0;
    do {
      for (auto& x : v) x = normal();
      n = norm2(v);
    } while (n < 1e-12);
    for (auto& x : v) x /= n;
    return v;
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stratlearn
