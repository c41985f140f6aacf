#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "potlab/common.hpp"

namespace potlab {

/// Nodes and weights on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Jacobi rule for the weight (1 - u)^a (1 + u)^b, a, b > -1,
/// by the Golub-Welsch eigenvalue method. Rules are cached; the returned
/// reference stays valid for the life of the program.
const QuadratureRule& gauss_jacobi(int n, double a, double b);
inline const QuadratureRule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// A rule for integrals over s in [0, L] of functions behaving like
/// s^start_exp (L - s)^end_exp near the ends: sum_i weights[i] * g(s[i]).
/// The weights already divide out the endpoint factors, so g is passed as is.
struct ArcRule {
  std::vector<double> s;
  std::vector<double> weights;
};
ArcRule endpoint_singular_rule(double length, int n, double start_exp, double end_exp);

/// Adaptive Gauss-Legendre for complex integrands on [a, b]. A panel's error
/// is estimated by comparing its 10-point value with its two halves. Panels
/// with the largest estimate are split first until the estimates sum below tol. Throws Errc::quadrature_no_convergence past max_depth.
cplx adaptive_gauss_legendre(const std::function<cplx(double)>& f, double a, double b, double tol, int max_depth = 40);
/// Vector-valued form: f(x, out) fills n values; the error estimate is the
/// largest componentwise difference.
std::vector<cplx> adaptive_gauss_legendre(const std::function<void(double, std::span<cplx>)>& f, int n, double a,
                                          double b, double tol, int max_depth = 40);

}  // namespace potlab
