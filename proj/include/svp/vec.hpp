#pragma once
// Small dense vectors/matrices over Euclidean and Lorentzian signatures.
// Lorentzian convention: the time coordinate is stored LAST, i.e.
// <x,y>_1 = sum_{i<d-1} x_i y_i - x_{d-1} y_{d-1}.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace svp {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row-major list of rows

enum class Signature { Euclidean, Lorentzian };

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double inner(const Vec& x, const Vec& y, Signature sig = Signature::Euclidean) {
  require(x.size() == y.size(), "inner: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  if (sig == Signature::Lorentzian) s -= 2.0 * x.back() * y.back();
  return s;
}

inline double norm(const Vec& x) { return std::sqrt(inner(x, x)); }

inline Vec add(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "add: dimension mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "sub: dimension mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scale(const Vec& a, double s) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// a + s*b
inline Vec axpy(const Vec& a, double s, const Vec& b) {
  require(a.size() == b.size(), "axpy: dimension mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
  return r;
}

inline Vec normalized(const Vec& a) {
  double n = norm(a);
  require(n > 0.0, "normalized: zero vector");
  return scale(a, 1.0 / n);
}

inline Vec zeros(size_t d) { return Vec(d, 0.0); }

inline Vec basis(size_t d, size_t i) {
  Vec r(d, 0.0);
  r[i] = 1.0;
  return r;
}

inline Mat mat_zeros(size_t r, size_t c) { return Mat(r, Vec(c, 0.0)); }

inline Mat identity(size_t d) {
  Mat m = mat_zeros(d, d);
  for (size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

inline Vec matvec(const Mat& m, const Vec& x) {
  Vec r(m.size(), 0.0);
  for (size_t i = 0; i < m.size(); ++i) r[i] = inner(m[i], x);
  return r;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Mat r = mat_zeros(n, m);
  for (size_t i = 0; i < n; ++i) {
    require(a[i].size() == k, "matmul: inner dimension mismatch");
    for (size_t l = 0; l < k; ++l)
      for (size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
  }
  return r;
}

inline Mat transpose(const Mat& m) {
  if (m.empty()) return m;
  Mat r = mat_zeros(m[0].size(), m.size());
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m[i].size(); ++j) r[j][i] = m[i][j];
  return r;
}

// Max |m - I| entry, for orthogonality checks.
inline double orthogonality_defect(const Mat& m) {
  Mat p = matmul(m, transpose(m));
  double d = 0.0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < p.size(); ++j)
      d = std::max(d, std::abs(p[i][j] - (i == j ? 1.0 : 0.0)));
  return d;
}

} // namespace svp
