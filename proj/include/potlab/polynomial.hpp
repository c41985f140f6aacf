#pragma once

#include <span>
#include <vector>

#include "potlab/common.hpp"

namespace potlab {

/// Univariate polynomial with complex coefficients, stored in ascending order.
/// Trailing exact zeros are trimmed, so degree() is the index of the last
/// nonzero coefficient (-1 for the zero polynomial).
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<cplx> coeffs);
  Poly(std::initializer_list<cplx> coeffs) : Poly(std::vector<cplx>(coeffs)) {}

  static Poly constant(cplx c) { return Poly({c}); }
  static Poly monomial(int degree, cplx c = 1.0);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx coeff(int j) const { return j >= 0 && j <= degree() ? c_[j] : cplx{}; }
  cplx leading() const { return c_.empty() ? cplx{} : c_.back(); }
  double max_abs_coeff() const;

  cplx operator()(cplx x) const;
  /// Value and first derivative by one Horner pass.
  void eval_with_derivative(cplx x, cplx& value, cplx& slope) const;

  Poly derivative() const;
  /// Antiderivative vanishing at 0.
  Poly antiderivative() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(cplx s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, cplx s) { return a *= s; }
  friend Poly operator*(cplx s, Poly a) { return a *= s; }
  bool operator==(const Poly&) const = default;

 private:
  void trim();
  std::vector<cplx> c_;
};

/// P(z, y) = sum_j p_j(z) y^j, the algebraic relation for a Cauchy transform.
///
/// Construction enforces p_k != 0 and squarefreeness in y (the resultant of P
/// and dP/dy in y is not identically zero). Irreducibility is not checked.
class BivariatePolynomial {
 public:
  explicit BivariatePolynomial(std::vector<Poly> coeffs_in_y);

  /// prod_nu (y - q_nu(z)): entire branches given explicitly.
  static BivariatePolynomial from_branches(std::span<const Poly> branches);
  /// z * P(y) - 1 for a univariate P(y) = y + c_2 y^2 + ... + c_k y^k.
  static BivariatePolynomial from_inverse_relation(const Poly& p_of_y);

  int degree_y() const { return static_cast<int>(p_.size()) - 1; }
  int degree_z() const;
  const Poly& coeff(int j) const { return p_[j]; }
  const std::vector<Poly>& coeffs() const { return p_; }

  /// Univariate polynomial in y at a fixed z.
  Poly fiber(cplx z) const;
  cplx operator()(cplx z, cplx y) const;
  cplx dy(cplx z, cplx y) const;
  cplx dz(cplx z, cplx y) const;
  /// max_j |p_j(z)|; the normalization used by every residual in the library.
  double scale(cplx z) const;
  /// |P(z,y)| / (scale(z) * max(1,|y|)^k).
  double residual(cplx z, cplx y) const;

  /// Res_y(P, dP/dy)(z), computed as a Sylvester determinant of the fibers.
  cplx resultant_at(cplx z) const;
  /// Hadamard bound of the Sylvester matrix at z (row-norm product); used to
  /// normalize resultant values.
  double resultant_bound(cplx z) const;
  /// Res_y(P, dP/dy) as a polynomial in z, by evaluation on a circle and
  /// inverse DFT. Coefficients below 1e-13 of the largest are dropped.
  Poly resultant_polynomial() const;

 private:
  struct Unchecked {};
  BivariatePolynomial(std::vector<Poly> coeffs, Unchecked);
  std::vector<Poly> p_;
};

}  // namespace potlab
