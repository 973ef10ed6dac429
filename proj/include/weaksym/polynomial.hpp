// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <array>
#include <utility>
#include <vector>

#include "weaksym/tensor.hpp"

namespace weaksym {

inline int pk_dim(int k) { return (k + 1) * (k + 2) / 2; }

/// Dense bivariate polynomial, coefficient of x^i y^j at c[i*(deg+1)+j].
/// Used for the exact symbolic work behind the bubble stresses (products,
/// derivatives, curls); evaluation cost is irrelevant at these degrees.
class Poly2 {
 public:
  Poly2() : deg_(0), c_(1, 0.0) {}
  explicit Poly2(int deg) : deg_(deg), c_((deg + 1) * (deg + 1), 0.0) {}
  static Poly2 monomial(int i, int j, double coef = 1.0);
  /// Affine polynomial a + bx*x + by*y.
  static Poly2 affine(double a, double bx, double by);

  int degree() const { return deg_; }
  double coef(int i, int j) const { return (i <= deg_ && j <= deg_) ? c_[idx(i, j)] : 0.0; }
  double& at(int i, int j) { return c_[idx(i, j)]; }

  double eval(Vec2 p) const;
  Poly2 dx() const;
  Poly2 dy() const;
  Poly2 operator*(const Poly2& o) const;
  Poly2 operator+(const Poly2& o) const;
  Poly2 operator-(const Poly2& o) const;
  Poly2 operator*(double s) const;

 private:
  int idx(int i, int j) const { return i * (deg_ + 1) + j; }
  int deg_;
  std::vector<double> c_;
};

/// Monomial exponent pairs (a,b), a+b <= k, ordered by total degree then by
/// descending a. The first pk_dim(d) entries span P_d for every d <= k.
std::vector<std::pair<int, int>> monomial_exponents(int k);

/// L2-orthonormal hierarchical basis of P_k on the reference triangle.
/// phi_i is a combination of monomials of total degree <= deg(i); the first
/// pk_dim(d) functions are an orthonormal basis of P_d.
class RefScalarBasis {
 public:
  explicit RefScalarBasis(int k);
  static const RefScalarBasis& get(int k);  // cached, k <= 8

  int degree() const { return k_; }
  int size() const { return n_; }
  /// Total degree of basis function i.
  int func_degree(int i) const { return degs_[i]; }

  double value(int i, Vec2 p) const { return polys_[i].eval(p); }
  Vec2 gradient(int i, Vec2 p) const { return {dx_[i].eval(p), dy_[i].eval(p)}; }

  /// values[i] for all i at point p (convenience for hot loops).
  void values(Vec2 p, double* out) const;
  void gradients(Vec2 p, Vec2* out) const;

 private:
  int k_, n_;
  std::vector<int> degs_;
  std::vector<Poly2> polys_, dx_, dy_;
};

/// Orthonormal shifted Legendre value on [0,1]: int_0^1 L_m L_n dt = delta_mn.
double legendre_orthonormal_01(int m, double t);

/// Nodal (Lagrange) basis of degree k on the reference triangle with the
/// uniform lattice (i/k, j/k). Node order follows monomial_exponents-free
/// lattice order: n = (i,j), j fastest, i+j <= k.
class RefLagrangeBasis {
 public:
  explicit RefLagrangeBasis(int k);
  static const RefLagrangeBasis& get(int k);

  int degree() const { return k_; }
  int size() const { return n_; }
  Vec2 node(int n) const { return nodes_[n]; }
  /// Barycentric lattice indices (i0,i1,i2) of node n, i0+i1+i2 = k,
  /// i0 ~ vertex (0,0), i1 ~ (1,0), i2 ~ (0,1).
  std::array<int, 3> lattice(int n) const { return lat_[n]; }

  double value(int n, Vec2 p) const;
  Vec2 gradient(int n, Vec2 p) const;
  /// Coefficient of RefScalarBasis function f in the nodal function n; lets
  /// callers convert nodal values to modal coefficients.
  double modal_coef(int n, int f) const { return coef_[n][f]; }

 private:
  int k_, n_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> lat_;
  std::vector<std::vector<double>> coef_;  // coef_[n][f]: expansion in RefScalarBasis
};

/// Values and reference gradients of RefScalarBasis(degree) tabulated at the
/// points of a triangle rule: val[pt*n + i], grad[pt*n + i].
struct ScalarBasisTable {
  int n = 0;
  std::vector<double> val;
  std::vector<Vec2> grad;
};
ScalarBasisTable tabulate_scalar_basis(int degree, const std::vector<Vec2>& points);

}  // namespace weaksym
