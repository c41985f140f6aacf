#include "potlab/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>

namespace potlab {

Poly::Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly Poly::monomial(int degree, cplx c) {
  std::vector<cplx> v(static_cast<size_t>(degree) + 1);
  v.back() = c;
  return Poly(std::move(v));
}

void Poly::trim() {
  while (!c_.empty() && c_.back() == cplx{}) c_.pop_back();
}

double Poly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : c_) m = std::max(m, std::abs(c));
  return m;
}

cplx Poly::operator()(cplx x) const {
  cplx acc{};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

void Poly::eval_with_derivative(cplx x, cplx& value, cplx& slope) const {
  value = cplx{};
  slope = cplx{};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    slope = slope * x + value;
    value = value * x + *it;
  }
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<cplx> d(c_.size() - 1);
  for (size_t j = 1; j < c_.size(); ++j) d[j - 1] = c_[j] * static_cast<double>(j);
  return Poly(std::move(d));
}

Poly Poly::antiderivative() const {
  if (c_.empty()) return {};
  std::vector<cplx> a(c_.size() + 1);
  for (size_t j = 0; j < c_.size(); ++j) a[j + 1] = c_[j] / static_cast<double>(j + 1);
  return Poly(std::move(a));
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (size_t j = 0; j < o.c_.size(); ++j) c_[j] += o.c_[j];
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (size_t j = 0; j < o.c_.size(); ++j) c_[j] -= o.c_[j];
  trim();
  return *this;
}

Poly& Poly::operator*=(cplx s) {
  for (auto& c : c_) c *= s;
  trim();
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<cplx> r(a.c_.size() + b.c_.size() - 1);
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(r));
}

// ---------------------------------------------------------------------------

BivariatePolynomial::BivariatePolynomial(std::vector<Poly> coeffs, Unchecked) : p_(std::move(coeffs)) {}

BivariatePolynomial::BivariatePolynomial(std::vector<Poly> coeffs_in_y) : p_(std::move(coeffs_in_y)) {
  while (!p_.empty() && p_.back().is_zero()) p_.pop_back();
  if (p_.size() < 2) fail(Errc::invalid_input, "polynomial must have degree >= 1 in y");

  // Squarefree iff the resultant with dP/dy is not identically zero. Probe
  // it on the interpolation circle plus a few off-circle points.
  const int n = (2 * degree_y() - 1) * std::max(degree_z(), 0) + 1;
  std::vector<cplx> probes;
  for (int j = 0; j < n; ++j) probes.push_back(std::polar(1.0, kTwoPi * j / n + 0.1));
  for (cplx z : {cplx(0.37, 0.61), cplx(-1.3, 0.2), cplx(2.1, -1.7)}) probes.push_back(z);
  double best = 0.0;
  for (cplx z : probes) {
    const double bound = resultant_bound(z);
    if (bound > 0.0) best = std::max(best, std::abs(resultant_at(z)) / bound);
  }
  if (best < 1e-11) fail(Errc::not_squarefree, "resultant of P and dP/dy vanishes identically (repeated factor in y)");
}

BivariatePolynomial BivariatePolynomial::from_branches(std::span<const Poly> branches) {
  if (branches.empty()) fail(Errc::invalid_input, "need at least one branch");
  std::vector<Poly> prod{Poly::constant(1.0)};
  for (const Poly& q : branches) {
    // multiply by (y - q)
    std::vector<Poly> next(prod.size() + 1);
    for (size_t j = 0; j < prod.size(); ++j) {
      next[j + 1] += prod[j];
      next[j] -= prod[j] * q;
    }
    prod = std::move(next);
  }
  return BivariatePolynomial(std::move(prod));
}

BivariatePolynomial BivariatePolynomial::from_inverse_relation(const Poly& p_of_y) {
  if (p_of_y.degree() < 1) fail(Errc::invalid_input, "P(y) must have degree >= 1");
  if (std::abs(p_of_y.coeff(0)) > 0.0) fail(Errc::invalid_input, "P(y) must vanish at y = 0");
  std::vector<Poly> c(static_cast<size_t>(p_of_y.degree()) + 1);
  c[0] = Poly::constant(-1.0);
  for (int j = 1; j <= p_of_y.degree(); ++j) c[j] = Poly::monomial(1, p_of_y.coeff(j));
  return BivariatePolynomial(std::move(c));
}

int BivariatePolynomial::degree_z() const {
  int d = 0;
  for (const auto& p : p_) d = std::max(d, p.degree());
  return d;
}

Poly BivariatePolynomial::fiber(cplx z) const {
  std::vector<cplx> c(p_.size());
  for (size_t j = 0; j < p_.size(); ++j) c[j] = p_[j](z);
  return Poly(std::move(c));
}

cplx BivariatePolynomial::operator()(cplx z, cplx y) const {
  cplx acc{};
  for (auto it = p_.rbegin(); it != p_.rend(); ++it) acc = acc * y + (*it)(z);
  return acc;
}

cplx BivariatePolynomial::dy(cplx z, cplx y) const {
  cplx acc{};
  for (int j = degree_y(); j >= 1; --j) acc = acc * y + static_cast<double>(j) * p_[j](z);
  return acc;
}

cplx BivariatePolynomial::dz(cplx z, cplx y) const {
  cplx acc{};
  for (auto it = p_.rbegin(); it != p_.rend(); ++it) {
    cplx v, s;
    it->eval_with_derivative(z, v, s);
    acc = acc * y + s;
  }
  return acc;
}

double BivariatePolynomial::scale(cplx z) const {
  double m = 0.0;
  for (const auto& p : p_) m = std::max(m, std::abs(p(z)));
  return m;
}

double BivariatePolynomial::residual(cplx z, cplx y) const {
  const double s = scale(z);
  const double grow = std::pow(std::max(1.0, std::abs(y)), degree_y());
  return s > 0.0 ? std::abs((*this)(z, y)) / (s * grow) : std::abs((*this)(z, y));
}

namespace {

Eigen::MatrixXcd sylvester(const BivariatePolynomial& P, cplx z) {
  const int k = P.degree_y();
  const int size = 2 * k - 1;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(size, size);
  std::vector<cplx> f(k + 1), g(k);
  for (int j = 0; j <= k; ++j) f[j] = P.coeff(j)(z);
  for (int j = 1; j <= k; ++j) g[j - 1] = static_cast<double>(j) * f[j];
  // f has formal degree k, g formal degree k-1; coefficients descending.
  for (int r = 0; r < k - 1; ++r)
    for (int j = 0; j <= k; ++j) S(r, r + j) = f[k - j];
  for (int r = 0; r < k; ++r)
    for (int j = 0; j < k; ++j) S(k - 1 + r, r + j) = g[k - 1 - j];
  return S;
}

}  // namespace

cplx BivariatePolynomial::resultant_at(cplx z) const {
  const Eigen::MatrixXcd S = sylvester(*this, z);
  return S.partialPivLu().determinant();
}

double BivariatePolynomial::resultant_bound(cplx z) const {
  const Eigen::MatrixXcd S = sylvester(*this, z);
  double b = 1.0;
  for (Eigen::Index r = 0; r < S.rows(); ++r) b *= S.row(r).norm();
  return b;
}

Poly BivariatePolynomial::resultant_polynomial() const {
  const int n = (2 * degree_y() - 1) * degree_z() + 1;
  std::vector<cplx> values(n);
  for (int j = 0; j < n; ++j) values[j] = resultant_at(std::polar(1.0, kTwoPi * j / n));
  std::vector<cplx> c(n);
  double biggest = 0.0;
  for (int m = 0; m < n; ++m) {
    cplx acc{};
    for (int j = 0; j < n; ++j) acc += values[j] * std::polar(1.0, -kTwoPi * static_cast<double>(j) * m / n);
    c[m] = acc / static_cast<double>(n);
    biggest = std::max(biggest, std::abs(c[m]));
  }
  for (auto& v : c)
    if (std::abs(v) < 1e-13 * biggest) v = 0.0;
  return Poly(std::move(c));
}

}  // namespace potlab
