#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "contact_spectral/util.hpp"

namespace contact_spectral {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline Vec axpy(double a, const Vec& x, const Vec& y) {
  Vec r(y);
  for (std::size_t i = 0; i < x.size(); ++i) r[i] += a * x[i];
  return r;
}

// Dense square matrix, row-major, sides up to 8.
class Mat {
 public:
  Mat() : n_(0) {}
  explicit Mat(int n) : n_(n), a_(n * n, 0.0) {
    if (n < 1 || n > 8) throw std::invalid_argument("Mat: side must be in [1,8]");
  }
  static Mat identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  int n() const { return n_; }
  double& operator()(int i, int j) { return a_[i * n_ + j]; }
  double operator()(int i, int j) const { return a_[i * n_ + j]; }

  Mat operator*(const Mat& o) const {
    Mat r(n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        double aik = (*this)(i, k);
        if (aik == 0.0) continue;
        for (int j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
      }
    return r;
  }

  Vec operator*(const Vec& v) const {
    Vec r(n_, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  Mat operator-(const Mat& o) const {
    Mat r(n_);
    for (int i = 0; i < n_ * n_; ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }

  Mat operator+(const Mat& o) const {
    Mat r(n_);
    for (int i = 0; i < n_ * n_; ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
  }

  Mat scaled(double c) const {
    Mat r(n_);
    for (int i = 0; i < n_ * n_; ++i) r.a_[i] = a_[i] * c;
    return r;
  }

  Mat transposed() const {
    Mat r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

 private:
  int n_;
  std::vector<double> a_;
};

// LU with partial pivoting; returns false when numerically singular.
inline bool lu_solve(Mat a, Vec b, Vec& x) {
  int n = a.n();
  std::array<int, 8> piv{};
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    double mag = std::abs(a(col, col));
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > mag) {
        mag = std::abs(a(r, col));
        best = r;
      }
    if (mag < 1e-300) return false;
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
      std::swap(b[col], b[best]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = a(r, col) / a(col, col);
      a(r, col) = 0.0;
      for (int j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

inline double det(Mat a) {
  int n = a.n();
  double d = 1.0;
  for (int col = 0; col < n; ++col) {
    int best = col;
    double mag = std::abs(a(col, col));
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > mag) {
        mag = std::abs(a(r, col));
        best = r;
      }
    if (mag == 0.0) return 0.0;
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
      d = -d;
    }
    d *= a(col, col);
    for (int r = col + 1; r < n; ++r) {
      double f = a(r, col) / a(col, col);
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return d;
}

// Jacobi eigenvalues of a symmetric matrix; eigenvectors in columns of v.
inline void jacobi_eigen(Mat a, Vec& eigenvalues, Mat& v) {
  int n = a.n();
  v = Mat::identity(n);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += sq(a(i, j));
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  eigenvalues.assign(n, 0.0);
  for (int i = 0; i < n; ++i) eigenvalues[i] = a(i, i);
}

}  // namespace contact_spectral
