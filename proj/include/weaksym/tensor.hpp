// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace weaksym {

/// Thrown on invalid user input (configs, geometry names, degenerate data).
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a linear solve fails or its residual is out of tolerance.
/// The CLI maps this to exit code 3.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
/// Rotate by -90 degrees: maps a tangent (lo -> hi) to the edge normal convention.
inline Vec2 rot_minus90(Vec2 t) { return {t.y, -t.x}; }

/// Dense 2x2 tensor, row-major: a(i,j) = m[2*i+j].
struct Mat2 {
  double m[4] = {0.0, 0.0, 0.0, 0.0};

  Mat2() = default;
  Mat2(double a00, double a01, double a10, double a11) : m{a00, a01, a10, a11} {}

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {}; }
  /// Outer product e_row ⊗ v: the given row is v, the other row is zero.
  static Mat2 single_row(int row, Vec2 v) {
    Mat2 r;
    r.m[2 * row + 0] = v.x;
    r.m[2 * row + 1] = v.y;
    return r;
  }

  double operator()(int i, int j) const { return m[2 * i + j]; }
  double& operator()(int i, int j) { return m[2 * i + j]; }

  Mat2 operator+(const Mat2& o) const {
    return {m[0] + o.m[0], m[1] + o.m[1], m[2] + o.m[2], m[3] + o.m[3]};
  }
  Mat2 operator-(const Mat2& o) const {
    return {m[0] - o.m[0], m[1] - o.m[1], m[2] - o.m[2], m[3] - o.m[3]};
  }
  Mat2 operator*(double s) const { return {m[0] * s, m[1] * s, m[2] * s, m[3] * s}; }
  Mat2& operator+=(const Mat2& o) {
    for (int i = 0; i < 4; ++i) m[i] += o.m[i];
    return *this;
  }

  Mat2 transpose() const { return {m[0], m[2], m[1], m[3]}; }
  double trace() const { return m[0] + m[3]; }
  Vec2 row(int i) const { return {m[2 * i + 0], m[2 * i + 1]}; }
  Vec2 apply(Vec2 v) const { return {m[0] * v.x + m[1] * v.y, m[2] * v.x + m[3] * v.y}; }

  Mat2 sym() const {
    const double off = 0.5 * (m[1] + m[2]);
    return {m[0], off, off, m[3]};
  }
  Mat2 skew() const {
    const double off = 0.5 * (m[1] - m[2]);
    return {0.0, off, -off, 0.0};
  }
  /// Deviatoric part (trace-free).
  Mat2 dev() const {
    const double t = 0.5 * trace();
    return {m[0] - t, m[1], m[2], m[3] - t};
  }
};

inline Mat2 operator*(double s, const Mat2& a) { return a * s; }
inline double ddot(const Mat2& a, const Mat2& b) {
  return a.m[0] * b.m[0] + a.m[1] * b.m[1] + a.m[2] * b.m[2] + a.m[3] * b.m[3];
}
inline double frob(const Mat2& a) { return std::sqrt(ddot(a, a)); }

/// The skew generator J = [[0,1],[-1,0]]; rotations are stored as q·J.
inline Mat2 skew_from_scalar(double q) { return {0.0, q, -q, 0.0}; }
/// Inverse of skew_from_scalar: the (0,1) entry of the skew part.
inline double skew_scalar(const Mat2& a) { return 0.5 * (a.m[1] - a.m[2]); }

}  // namespace weaksym
