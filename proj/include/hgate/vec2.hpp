#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace hgate {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double& operator[](int i) { return i == 0 ? x : y; }
  double operator[](int i) const { return i == 0 ? x : y; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return s * v; }
inline Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }
inline Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::sqrt(dot(v, v)); }
inline double norm_inf(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }

/// Planar wedge product u ^ v = u.x v.y - u.y v.x.
inline double wedge(Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; }

/// Counterclockwise perpendicular (-y, x).
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

inline std::ostream& operator<<(std::ostream& os, Vec2 v) {
  return os << "(" << v.x << ", " << v.y << ")";
}

/// 2x2 real matrix, row-major.
struct Mat2 {
  double a = 0.0, b = 0.0;  // row 0
  double c = 0.0, d = 0.0;  // row 1

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {}; }

  double operator()(int i, int j) const {
    return i == 0 ? (j == 0 ? a : b) : (j == 0 ? c : d);
  }

  Vec2 row(int i) const { return i == 0 ? Vec2{a, b} : Vec2{c, d}; }
  Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }
};

inline Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

inline Mat2 operator*(const Mat2& l, const Mat2& r) {
  return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
          l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

inline Mat2 operator+(const Mat2& l, const Mat2& r) {
  return {l.a + r.a, l.b + r.b, l.c + r.c, l.d + r.d};
}

inline Mat2 operator*(double s, const Mat2& m) {
  return {s * m.a, s * m.b, s * m.c, s * m.d};
}

inline Mat2 transpose(const Mat2& m) { return {m.a, m.c, m.b, m.d}; }

inline Mat2 inverse(const Mat2& m) {
  const double det = m.det();
  return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

inline bool is_finite(const Mat2& m) {
  return std::isfinite(m.a) && std::isfinite(m.b) && std::isfinite(m.c) &&
         std::isfinite(m.d);
}

/// Sum of all four entries; used for the second-derivative double sums in
/// integrands.
inline double sum_entries(const Mat2& m) { return m.a + m.b + m.c + m.d; }

/// Column sums of H contracted with w.
inline double colsum_contract(const Mat2& h, Vec2 w) {
  return (h.a + h.c) * w.x + (h.b + h.d) * w.y;
}

}  // namespace hgate
