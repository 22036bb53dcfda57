#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace contact_spectral {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

namespace tol {
constexpr double geometric = 1e-10;        // pointwise geometric equality
constexpr double loop_closure = 1e-6;      // closure gap for winding loops
constexpr double discretized_loop = 1e-8;  // closure gap for action-functional loops
constexpr double solver_residual = 1e-10;  // Newton target residual
constexpr double distinct = 1e-4;          // geometric distinctness threshold
}  // namespace tol

inline double sq(double x) { return x * x; }

// Representative in [0,1).
inline double mod1(double x) {
  double m = x - std::floor(x);
  return (m >= 1.0) ? 0.0 : m;
}

// Signed circle distance, wrapped to [-1/2, 1/2).
inline double wrap_half(double x) {
  double m = mod1(x + 0.5) - 0.5;
  return m;
}

// Quintic smoothstep: S(0)=0, S(1)=1, S'=S''=0 at both ends.
inline double smoothstep5(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

inline double smoothstep5_deriv(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 30.0 * u * u * (1.0 - u) * (1.0 - u);
}

// C-infinity bump on (-1,1), value 1 at 0.
inline double exp_bump(double u) {
  double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

inline double exp_bump_deriv(double u) {
  double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  double d = 1.0 - u * u;
  return exp_bump(u) * (-2.0 * u / (d * d));
}

// Composite Simpson on [a,b]; intervals is rounded up to an even count.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2) ++intervals;
  double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double trapezoid(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals < 1) intervals = 1;
  double h = (b - a) / intervals;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < intervals; ++i) s += f(a + i * h);
  return s * h;
}

inline int max_threads() {
  if (const char* env = std::getenv("CONTACT_SPECTRAL_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0,count); results must be written by index so the
// merge order never depends on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  int nthreads = std::min<std::size_t>(max_threads(), count);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::size_t chunk = (count + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Gray-code Sobol sequence, dimensions <= 6.
class Sobol {
 public:
  explicit Sobol(int dim, std::uint64_t skip = 0) : dim_(dim), index_(0), x_(dim, 0) {
    if (dim < 1 || dim > 6) throw std::invalid_argument("Sobol: dimension must be in [1,6]");
    static const struct {
      int s, a;
      int m[4];
    } joe_kuo[5] = {
        {1, 0, {1, 0, 0, 0}},
        {2, 1, {1, 3, 0, 0}},
        {3, 1, {1, 3, 1, 0}},
        {3, 2, {1, 1, 1, 0}},
        {4, 1, {1, 1, 3, 3}},
    };
    for (int d = 0; d < dim_; ++d) {
      auto& v = dir_[d];
      if (d == 0) {
        for (int i = 0; i < kBits; ++i) v[i] = 1ull << (kBits - 1 - i);
        continue;
      }
      const auto& row = joe_kuo[d - 1];
      int s = row.s;
      std::array<std::uint64_t, kBits> m{};
      for (int i = 0; i < s; ++i) m[i] = row.m[i];
      for (int i = s; i < kBits; ++i) {
        std::uint64_t val = m[i - s] ^ (m[i - s] << s);
        for (int k = 1; k < s; ++k)
          if ((row.a >> (s - 1 - k)) & 1) val ^= m[i - k] << k;
        m[i] = val;
      }
      for (int i = 0; i < kBits; ++i) v[i] = m[i] << (kBits - 1 - i);
    }
    for (std::uint64_t i = 0; i < skip; ++i) advance();
  }

  // Next point in [0,1)^dim.
  std::vector<double> next() {
    advance();
    std::vector<double> p(dim_);
    for (int d = 0; d < dim_; ++d) p[d] = static_cast<double>(x_[d]) / kScale;
    return p;
  }

 private:
  static constexpr int kBits = 52;
  static constexpr double kScale = 4503599627370496.0;  // 2^52

  void advance() {
    std::uint64_t i = index_++;
    int c = 0;
    while (i & 1) {
      ++c;
      i >>= 1;
    }
    for (int d = 0; d < dim_; ++d) x_[d] ^= dir_[d][c];
  }

  int dim_;
  std::uint64_t index_;
  std::vector<std::uint64_t> x_;
  std::array<std::array<std::uint64_t, kBits>, 6> dir_{};
};

// 12 significant digits, the report-wide number format.
inline std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace contact_spectral
