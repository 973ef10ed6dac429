// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/polynomial.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <mutex>

namespace weaksym {

Poly2 Poly2::monomial(int i, int j, double coef) {
  Poly2 p(i + j);
  p.at(i, j) = coef;
  return p;
}

Poly2 Poly2::affine(double a, double bx, double by) {
  Poly2 p(1);
  p.at(0, 0) = a;
  p.at(1, 0) = bx;
  p.at(0, 1) = by;
  return p;
}

double Poly2::eval(Vec2 p) const {
  // Horner in x of Horner-in-y rows.
  double acc = 0.0;
  for (int i = deg_; i >= 0; --i) {
    double row = 0.0;
    for (int j = deg_; j >= 0; --j) row = row * p.y + c_[idx(i, j)];
    acc = acc * p.x + row;
  }
  return acc;
}

Poly2 Poly2::dx() const {
  Poly2 r(deg_ > 0 ? deg_ - 1 : 0);
  for (int i = 1; i <= deg_; ++i)
    for (int j = 0; j <= deg_ - i; ++j) r.at(i - 1, j) = i * c_[idx(i, j)];
  return r;
}

Poly2 Poly2::dy() const {
  Poly2 r(deg_ > 0 ? deg_ - 1 : 0);
  for (int i = 0; i <= deg_; ++i)
    for (int j = 1; j <= deg_ - i; ++j) r.at(i, j - 1) = j * c_[idx(i, j)];
  return r;
}

Poly2 Poly2::operator*(const Poly2& o) const {
  Poly2 r(deg_ + o.deg_);
  for (int i = 0; i <= deg_; ++i)
    for (int j = 0; j <= deg_; ++j) {
      const double a = c_[idx(i, j)];
      if (a == 0.0) continue;
      for (int p = 0; p <= o.deg_; ++p)
        for (int q = 0; q <= o.deg_; ++q) r.at(i + p, j + q) += a * o.c_[o.idx(p, q)];
    }
  return r;
}

Poly2 Poly2::operator+(const Poly2& o) const {
  Poly2 r(std::max(deg_, o.deg_));
  for (int i = 0; i <= r.deg_; ++i)
    for (int j = 0; j <= r.deg_; ++j) r.at(i, j) = coef(i, j) + o.coef(i, j);
  return r;
}

Poly2 Poly2::operator-(const Poly2& o) const {
  Poly2 r(std::max(deg_, o.deg_));
  for (int i = 0; i <= r.deg_; ++i)
    for (int j = 0; j <= r.deg_; ++j) r.at(i, j) = coef(i, j) - o.coef(i, j);
  return r;
}

Poly2 Poly2::operator*(double s) const {
  Poly2 r = *this;
  for (auto& v : r.c_) v *= s;
  return r;
}

std::vector<std::pair<int, int>> monomial_exponents(int k) {
  std::vector<std::pair<int, int>> exps;
  exps.reserve(pk_dim(k));
  for (int d = 0; d <= k; ++d)
    for (int a = d; a >= 0; --a) exps.emplace_back(a, d - a);
  return exps;
}

RefScalarBasis::RefScalarBasis(int k) : k_(k), n_(pk_dim(k)) {
  const auto exps = monomial_exponents(k);
  // The monomial Gram matrix is ill-conditioned (~1e5 at degree 4); doing the
  // Cholesky orthogonalization in extended precision keeps the orthonormality
  // defect of the double-precision coefficients near 1e-13.
  std::vector<long double> gram(n_ * n_), chol(n_ * n_, 0.0L);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      long double v = 1.0L;
      const int p = exps[i].first + exps[j].first, q = exps[i].second + exps[j].second;
      for (int t = 1; t <= q; ++t) v *= static_cast<long double>(t) / (p + t);
      gram[i * n_ + j] = v / ((p + q + 1.0L) * (p + q + 2.0L));
    }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j <= i; ++j) {
      long double s = gram[i * n_ + j];
      for (int t = 0; t < j; ++t) s -= chol[i * n_ + t] * chol[j * n_ + t];
      chol[i * n_ + j] = (i == j) ? std::sqrt(s) : s / chol[j * n_ + j];
    }
  }
  // phi = L^{-1} m is orthonormal and hierarchical (L is lower triangular).
  Eigen::MatrixXd C(n_, n_);
  for (int col = 0; col < n_; ++col) {
    std::vector<long double> x(n_, 0.0L);
    for (int i = col; i < n_; ++i) {
      long double s = (i == col) ? 1.0L : 0.0L;
      for (int t = col; t < i; ++t) s -= chol[i * n_ + t] * x[t];
      x[i] = s / chol[i * n_ + i];
    }
    // x solves L x = e_col, so row i of L^{-1} is x over columns.
    for (int i = 0; i < n_; ++i) C(i, col) = static_cast<double>(x[i]);
  }
  polys_.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    Poly2 p(exps[i].first + exps[i].second);
    for (int j = 0; j <= i; ++j) p = p + Poly2::monomial(exps[j].first, exps[j].second, C(i, j));
    polys_.push_back(p);
    dx_.push_back(p.dx());
    dy_.push_back(p.dy());
    degs_.push_back(exps[i].first + exps[i].second);
  }
}

const RefScalarBasis& RefScalarBasis::get(int k) {
  if (k < 0 || k > 8) throw ValidationError("RefScalarBasis: degree out of range");
  static std::array<const RefScalarBasis*, 9> cache{};
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (!cache[k]) cache[k] = new RefScalarBasis(k);
  return *cache[k];
}

void RefScalarBasis::values(Vec2 p, double* out) const {
  for (int i = 0; i < n_; ++i) out[i] = polys_[i].eval(p);
}

void RefScalarBasis::gradients(Vec2 p, Vec2* out) const {
  for (int i = 0; i < n_; ++i) out[i] = {dx_[i].eval(p), dy_[i].eval(p)};
}

double legendre_orthonormal_01(int m, double t) {
  const double x = 2.0 * t - 1.0;
  double p0 = 1.0, p1 = x;
  if (m == 0) return 1.0;
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt(2.0 * m + 1.0) * p1;
}

RefLagrangeBasis::RefLagrangeBasis(int k) : k_(k), n_(pk_dim(k)) {
  if (k < 1) throw ValidationError("RefLagrangeBasis: degree must be >= 1");
  const auto& scalar = RefScalarBasis::get(k);
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k - i; ++j) {
      nodes_.push_back({static_cast<double>(i) / k, static_cast<double>(j) / k});
      lat_.push_back({k - i - j, i, j});
    }
  Eigen::MatrixXd vand(n_, n_);
  for (int nn = 0; nn < n_; ++nn)
    for (int f = 0; f < n_; ++f) vand(nn, f) = scalar.value(f, nodes_[nn]);
  const Eigen::MatrixXd inv = vand.partialPivLu().inverse();
  coef_.assign(n_, std::vector<double>(n_));
  for (int nn = 0; nn < n_; ++nn)
    for (int f = 0; f < n_; ++f) coef_[nn][f] = inv(f, nn);
}

const RefLagrangeBasis& RefLagrangeBasis::get(int k) {
  if (k < 1 || k > 8) throw ValidationError("RefLagrangeBasis: degree out of range");
  static std::array<const RefLagrangeBasis*, 9> cache{};
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (!cache[k]) cache[k] = new RefLagrangeBasis(k);
  return *cache[k];
}

double RefLagrangeBasis::value(int n, Vec2 p) const {
  const auto& scalar = RefScalarBasis::get(k_);
  double acc = 0.0;
  for (int f = 0; f < n_; ++f) acc += coef_[n][f] * scalar.value(f, p);
  return acc;
}

Vec2 RefLagrangeBasis::gradient(int n, Vec2 p) const {
  const auto& scalar = RefScalarBasis::get(k_);
  Vec2 acc;
  for (int f = 0; f < n_; ++f) acc += coef_[n][f] * scalar.gradient(f, p);
  return acc;
}

ScalarBasisTable tabulate_scalar_basis(int degree, const std::vector<Vec2>& points) {
  const auto& basis = RefScalarBasis::get(degree);
  ScalarBasisTable tab;
  tab.n = basis.size();
  tab.val.resize(points.size() * tab.n);
  tab.grad.resize(points.size() * tab.n);
  for (std::size_t q = 0; q < points.size(); ++q) {
    basis.values(points[q], tab.val.data() + q * tab.n);
    basis.gradients(points[q], tab.grad.data() + q * tab.n);
  }
  return tab;
}

}  // namespace weaksym
