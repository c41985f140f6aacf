#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "potlab/configurations.hpp"

namespace potlab {

struct Atom {
  cplx z;
  double w;
};

enum class ArcRuleKind { trapezoid, gauss_jacobi };

/// A density along a polyline, parametrized by arclength s in [0, L].
///
/// trapezoid: density[i] is the value at points[i]; piecewise-linear in s.
/// gauss_jacobi: density[i] is the full density at the i-th node of
/// endpoint_singular_rule(L, n, alpha, beta), the density behaving like
/// s^alpha near the first point and (L - s)^beta near the last.
struct Arc {
  std::vector<cplx> points;
  std::vector<double> density;
  ArcRuleKind rule = ArcRuleKind::trapezoid;
  double alpha = 0.0, beta = 0.0;

  double length() const;
  cplx at(double s) const;
  /// Quadrature nodes and weights (density folded into the weights).
  std::vector<std::pair<cplx, double>> discretize() const;
};

/// Builds a Gauss-Jacobi arc by sampling `density` at the rule's nodes.
Arc gauss_jacobi_arc(std::vector<cplx> points, int n, double alpha, double beta,
                     const std::function<double(cplx)>& density);

/// A nonnegative measure made of atoms and arc densities.
struct Measure {
  std::vector<Atom> atoms;
  std::vector<Arc> arcs;

  double total_mass() const;
  double diameter() const;
  double distance_to_support(cplx z) const;
  /// Throws InvalidInput on a negative weight or density sample.
  void validate() const;
};

/// sum of dmu(zeta) / (z - zeta). Errors: TooCloseToSupport.
cplx cauchy_transform(const Measure& mu, cplx z);
/// integral of log|z - zeta| dmu(zeta), so that 2 d/dz of it is the Cauchy transform.
double log_potential(const Measure& mu, cplx z);
/// max over samples of |P(z, mu^(z))| normalized as in BivariatePolynomial::residual.
double verify_algebraic_relation(const BivariatePolynomial& P, const Measure& mu, std::span<const cplx> samples);

/// The logarithmic potential on a grid, as a one-branch field.
ConfigurationField potential_field(const Measure& mu, const Grid& grid, Execution exec = Execution::parallel);

/// lambda = grad(H_a - H_b) . n along one curve of {H_i = H_j}, with n the
/// unit normal pointing into the side where H_a is active.
struct InterfaceDensity {
  int i = 0, j = 0;     // the curve's pair
  int a = -1, b = -1;   // a active on the normal side; -1 when the curve is not an interface
  std::vector<cplx> points;
  std::vector<double> s;
  std::vector<double> lambda;

  bool active() const { return a >= 0; }
  /// (1 / 2 pi) * integral of lambda ds, optionally restricted to a disk.
  double mass(std::optional<std::pair<cplx, double>> disk = std::nullopt) const;
};

struct RieszDensity {
  std::vector<InterfaceDensity> interfaces;
  double mass(std::optional<std::pair<cplx, double>> disk = std::nullopt) const;
  double min_lambda() const;
};

/// Each curve is classified by the active indices found just to either side
/// of its samples (1e-3 h off the curve when components are available, 2 h
/// otherwise). A curve is an interface when at least 80% of its samples see
/// {i, j}, and is dropped as inactive when at most 20% do. Errors: AmbiguousInterface when neither holds or the
/// side holding H_i flips along the curve.
RieszDensity jump_density(const ConfigurationField& F, const HarmonicTuple& H, std::span<const LevelCurve> curves);

/// (1 / 2 pi) times the outward flux of grad V through the circle.
/// Crossings of the circle with interfaces are located first; between them
/// the active component is differentiated along the normal. Without
/// components the values themselves are differentiated.
/// Errors: CircleExitsGrid.
double stokes_mass(const ConfigurationField& F, cplx center, double radius);

}  // namespace potlab
