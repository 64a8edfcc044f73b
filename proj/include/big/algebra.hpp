#pragma once

// Small fixed-size linear algebra. All sign conventions for the 2D reductions
// of cross products live here:
//   a x b  (vectors)  := a1*b2 - a2*b1        (scalar, the e3 component)
//   w x v  (w scalar) := w * (-v2, v1)        (w e3 crossed with an in-plane vector)

#include <array>
#include <cmath>
#include <cstddef>

namespace big {

template <std::size_t Dim>
using VecN = std::array<double, Dim>;

/// Row-major Dim x Dim matrix.
template <std::size_t Dim>
using MatN = std::array<std::array<double, Dim>, Dim>;

using Vec3 = VecN<3>;
using Mat3 = MatN<3>;

template <std::size_t Dim>
constexpr MatN<Dim> identity() {
  MatN<Dim> m{};
  for (std::size_t i = 0; i < Dim; ++i) m[i][i] = 1.0;
  return m;
}

template <std::size_t Dim>
constexpr MatN<Dim> transpose(const MatN<Dim>& a) {
  MatN<Dim> t{};
  for (std::size_t i = 0; i < Dim; ++i)
    for (std::size_t j = 0; j < Dim; ++j) t[i][j] = a[j][i];
  return t;
}

template <std::size_t Dim>
constexpr MatN<Dim> matmul(const MatN<Dim>& a, const MatN<Dim>& b) {
  MatN<Dim> c{};
  for (std::size_t i = 0; i < Dim; ++i)
    for (std::size_t k = 0; k < Dim; ++k)
      for (std::size_t j = 0; j < Dim; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

template <std::size_t Dim>
constexpr VecN<Dim> matvec(const MatN<Dim>& a, const VecN<Dim>& v) {
  VecN<Dim> r{};
  for (std::size_t i = 0; i < Dim; ++i)
    for (std::size_t j = 0; j < Dim; ++j) r[i] += a[i][j] * v[j];
  return r;
}

template <std::size_t Dim>
constexpr double trace(const MatN<Dim>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) s += a[i][i];
  return s;
}

template <std::size_t Dim>
double max_abs_diff(const MatN<Dim>& a, const MatN<Dim>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < Dim; ++i)
    for (std::size_t j = 0; j < Dim; ++j) m = std::fmax(m, std::fabs(a[i][j] - b[i][j]));
  return m;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Skew matrix with skew(w) v = w x v.
inline Mat3 skew(const Vec3& w) {
  return {{{0.0, -w[2], w[1]}, {w[2], 0.0, -w[0]}, {-w[1], w[0], 0.0}}};
}

/// exp(skew(w)) by Rodrigues' formula.
inline Mat3 rodrigues(const Vec3& w) {
  const double th = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
  const Mat3 k = skew(w);
  const Mat3 k2 = matmul(k, k);
  double a, b;
  if (th < 1e-8) {
    a = 1.0 - th * th / 6.0;
    b = 0.5 - th * th / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / (th * th);
  }
  Mat3 r = identity<3>();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] += a * k[i][j] + b * k2[i][j];
  return r;
}

// ---------------------------------------------------------------------------
// 2D types used by the runtime discretization.

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : y; }
  constexpr double& operator[](int i) { return i == 0 ? x : y; }

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// a x b for in-plane vectors (the out-of-plane component).
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// (w e3) x v for a scalar angular velocity w.
constexpr Vec2 cross(double w, const Vec2& v) { return {-w * v.y, w * v.x}; }

struct Mat2 {
  // row-major: (0,0) (0,1) (1,0) (1,1)
  std::array<double, 4> a{};

  constexpr double operator()(int i, int j) const { return a[2 * i + j]; }
  constexpr double& operator()(int i, int j) { return a[2 * i + j]; }

  static constexpr Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }
  static constexpr Mat2 zero() { return Mat2{}; }

  constexpr Mat2& operator+=(const Mat2& o) { for (int k = 0; k < 4; ++k) a[k] += o.a[k]; return *this; }
  constexpr Mat2& operator-=(const Mat2& o) { for (int k = 0; k < 4; ++k) a[k] -= o.a[k]; return *this; }
  constexpr Mat2& operator*=(double s) { for (double& v : a) v *= s; return *this; }
  friend constexpr Mat2 operator+(Mat2 x, const Mat2& y) { return x += y; }
  friend constexpr Mat2 operator-(Mat2 x, const Mat2& y) { return x -= y; }
  friend constexpr Mat2 operator*(double s, Mat2 x) { return x *= s; }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

constexpr Mat2 operator*(const Mat2& p, const Mat2& q) {
  return Mat2{{p(0, 0) * q(0, 0) + p(0, 1) * q(1, 0), p(0, 0) * q(0, 1) + p(0, 1) * q(1, 1),
               p(1, 0) * q(0, 0) + p(1, 1) * q(1, 0), p(1, 0) * q(0, 1) + p(1, 1) * q(1, 1)}};
}

constexpr Vec2 operator*(const Mat2& m, const Vec2& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y, m(1, 0) * v.x + m(1, 1) * v.y};
}

constexpr Mat2 transpose(const Mat2& m) { return Mat2{{m(0, 0), m(1, 0), m(0, 1), m(1, 1)}}; }
constexpr double det(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }
constexpr double trace(const Mat2& m) { return m(0, 0) + m(1, 1); }

/// Caller guarantees det(m) != 0.
constexpr Mat2 inverse(const Mat2& m) {
  const double d = det(m);
  return Mat2{{m(1, 1) / d, -m(0, 1) / d, -m(1, 0) / d, m(0, 0) / d}};
}

/// Frobenius inner product A:B.
constexpr double ddot(const Mat2& p, const Mat2& q) {
  return p.a[0] * q.a[0] + p.a[1] * q.a[1] + p.a[2] * q.a[2] + p.a[3] * q.a[3];
}

inline double max_abs(const Mat2& m) {
  return std::fmax(std::fmax(std::fabs(m.a[0]), std::fabs(m.a[1])), std::fmax(std::fabs(m.a[2]), std::fabs(m.a[3])));
}

constexpr Mat2 sym(const Mat2& m) {
  const double off = 0.5 * (m(0, 1) + m(1, 0));
  return Mat2{{m(0, 0), off, off, m(1, 1)}};
}

/// skew(w) v = w x v in 2D.
constexpr Mat2 skew(double w) { return Mat2{{0.0, -w, w, 0.0}}; }

/// Counter-clockwise rotation by `angle`.
inline Mat2 rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return Mat2{{c, -s, s, c}};
}

}  // namespace big
