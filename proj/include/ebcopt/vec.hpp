#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ebcopt {

using Vec = std::vector<double>;

inline void check_same_dim(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
}

inline double dot(const Vec& a, const Vec& b) {
  check_same_dim(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm1(const Vec& a) {
  double s = 0;
  for (double v : a) s += std::abs(v);
  return s;
}

inline double norm_inf(const Vec& a) {
  double s = 0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

inline double dist2(const Vec& a, const Vec& b) {
  check_same_dim(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Vec add(const Vec& a, const Vec& b) {
  check_same_dim(a, b);
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  check_same_dim(a, b);
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scale(const Vec& a, double c) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

// y += c * x
inline void axpy(double c, const Vec& x, Vec& y) {
  check_same_dim(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline Vec zeros(std::size_t d) { return Vec(d, 0.0); }

inline int sgn(double v) { return (v > 0) - (v < 0); }

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace ebcopt
