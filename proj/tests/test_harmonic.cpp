#include <cmath>
#include <random>

#include "doctest.h"
#include "potlab/harmonic.hpp"

using namespace potlab;

namespace {

// collinear triple: g1 = 0, g2 = 2 + z, g3 = -1/2
HarmonicTuple example211() { return HarmonicTuple::from_branches({Poly{0.0}, Poly{2.0, 1.0}, Poly{-0.5}}); }

double h2(double x, double y) { return 4 * x + x * x - y * y; }

// antiderivative of sqrt(1 + 4/w) on w > 0
double sqrt_antiderivative(double w) { return std::sqrt(w * (w + 4)) + 4 * std::log(std::sqrt(w) + std::sqrt(w + 4)); }

double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  auto one_side = [](const std::vector<cplx>& p, const std::vector<cplx>& q) {
    double worst = 0.0;
    for (cplx x : p) {
      double best = INFINITY;
      for (cplx y : q) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_side(a, b), one_side(b, a));
}

}  // namespace

TEST_CASE("primitive of 1/z") {
  const BivariatePolynomial P({Poly{-1.0}, Poly{0.0, 1.0}});
  const HarmonicTuple H(P, 1.0);
  const std::vector<cplx> seg{1.0, std::exp(1.0)};
  CHECK(std::abs(primitive(H, 0, std::exp(1.0), seg) - 1.0) < 1e-10);
  const auto loop = circle_path(0.0, 1.0, 64);
  CHECK(std::abs(primitive(H, 0, 1.0, loop) - cplx(0.0, kTwoPi)) < 1e-9);
  CHECK(primitive(H, 0, 1.0) == cplx{});
}

TEST_CASE("primitive of the exterior branch against the closed form") {
  const BivariatePolynomial P({Poly{-1.0}, Poly{0.0, 1.0}, Poly{0.0, 1.0}});
  const HarmonicTuple H(P, 10.0);
  // labels sorted by real part: the exterior branch is the larger root
  CHECK(std::abs(H.base_labels()[1] - (-1.0 + std::sqrt(1.4)) / 2.0) < 1e-14);
  const std::vector<cplx> seg{10.0, 20.0};
  const double oracle = 0.5 * (sqrt_antiderivative(20.0) - sqrt_antiderivative(10.0) - 10.0);
  CHECK(std::abs(primitive(H, 1, 20.0, seg) - oracle) < 1e-9);
  CHECK(std::abs(primitive(H, 1, 20.0) - oracle) < 1e-9);
}

TEST_CASE("constant branches and the factor-2 convention") {
  const HarmonicTuple one(BivariatePolynomial({Poly{-1.0}, Poly{1.0}}), 0.0, {}, {0.25});
  CHECK(harmonic_value(one, 0, cplx(0.3, 0.7)) == doctest::Approx(0.6 + 0.25));
  auto g = harmonic_gradient(one, 0, cplx(0.3, 0.7));
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(0.0));
  CHECK(harmonic_value(one, 0, 0.0) == 0.25);

  const HarmonicTuple eye(BivariatePolynomial({Poly{cplx(0, -1)}, Poly{1.0}}), 0.0);
  CHECK(harmonic_value(eye, 0, cplx(0.3, 0.7)) == doctest::Approx(-1.4));
  g = harmonic_gradient(eye, 0, cplx(0.3, 0.7));
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(-2.0));

  const HarmonicTuple T = example211();
  g = harmonic_gradient(T, 1, 0.0);
  CHECK(g[0] == doctest::Approx(4.0));
  CHECK(g[1] == doctest::Approx(0.0));
  CHECK(harmonic_value(T, 1, cplx(0.3, 0.2)) == doctest::Approx(h2(0.3, 0.2)).epsilon(1e-14));
}

TEST_CASE("gradient matches central differences of the value") {
  const BivariatePolynomial P({Poly{-1.0}, Poly{0.0, 1.0}, Poly{0.0, 1.0}});
  const HarmonicTuple H(P, 10.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(2.0, 12.0), uy(-5.0, 5.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const cplx z(ux(rng), uy(rng));
    for (int nu = 0; nu < 2; ++nu) {
      const auto g = harmonic_gradient(H, nu, z);
      const double fx = (harmonic_value(H, nu, z + h) - harmonic_value(H, nu, z - h)) / (2 * h);
      const double fy =
          (harmonic_value(H, nu, z + cplx(0, h)) - harmonic_value(H, nu, z - cplx(0, h))) / (2 * h);
      const double norm = std::hypot(g[0], g[1]);
      CHECK(std::hypot(fx - g[0], fy - g[1]) <= 1e-6 * std::max(norm, 1e-3));
    }
  }
}

TEST_CASE("path independence for homotopic paths") {
  const BivariatePolynomial P({Poly{-1.0}, Poly{0.0, 1.0}, Poly{0.0, 1.0}});
  const HarmonicTuple H(P, 10.0);
  const std::vector<cplx> a{10.0, cplx(10, 5), cplx(3, 5), cplx(3, 1)};
  const std::vector<cplx> b{10.0, cplx(6, -2), cplx(3, 1)};
  for (int nu = 0; nu < 2; ++nu)
    CHECK(std::abs(primitive(H, nu, cplx(3, 1), a) - primitive(H, nu, cplx(3, 1), b)) < 2 * tol::quad);
}

TEST_CASE("canonical path detours around singular points") {
  const BivariatePolynomial P({Poly{-1.0}, Poly{0.0, 1.0}, Poly{0.0, 1.0}});
  const HarmonicTuple H(P, 10.0);
  const auto path = H.canonical_path(-6.0);
  const SingularSet& S = H.singular_set();
  for (size_t m = 0; m + 1 < path.size(); ++m) CHECK(S.segment_distance(path[m], path[m + 1]) > 0.5 * S.safety_radius);
  // counterclockwise around 0 from the right means passing through the upper half-plane
  bool upper = false;
  for (cplx z : path) upper = upper || (std::abs(z) < 1.01 && z.imag() > 0.9);
  CHECK(upper);
  CHECK_THROWS_AS(H.canonical_path(cplx(-4.0, 0.1)), Error);
}

TEST_CASE("level curve of 2x - (-2x) is the imaginary axis") {
  const HarmonicTuple H = HarmonicTuple::from_branches({Poly{1.0}, Poly{-1.0}});
  TraceOptions opts;
  opts.max_step = 0.05;
  opts.arclength_budget = 1.0;
  const LevelCurve L = trace_level_curve(H, 0, 1, 0.0, cplx(0, 0.5), opts);
  CHECK(L.points.size() > 20);
  CHECK(L.max_residual() < 1e-10);
  for (cplx z : L.points) CHECK(std::abs(z.real()) < 1e-10);
  CHECK(L.stop_forward == "budget");
  for (size_t m = 0; m + 1 < L.points.size(); ++m) CHECK(std::abs(L.points[m + 1] - L.points[m]) <= opts.max_step + 1e-12);
}

TEST_CASE("level curve 5x + x^2 - y^2 = 0 through the origin") {
  const HarmonicTuple H = example211();
  TraceOptions opts;
  opts.max_step = 0.01;
  opts.arclength_budget = 0.5;
  const LevelCurve L = trace_level_curve(H, 1, 2, 0.0, cplx(0.002, 0.1), opts);
  bool through_origin = false;
  for (cplx z : L.points) {
    const double x = z.real(), y = z.imag();
    CHECK(std::abs(5 * x + x * x - y * y) < 1e-8);
    // oracle: bisection in x on [-1, 1] for fixed y
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((5 * lo + lo * lo - y * y) * (5 * mid + mid * mid - y * y) <= 0.0 ? hi : lo) = mid;
    }
    CHECK(std::abs(x - 0.5 * (lo + hi)) < 1e-8);
    through_origin = through_origin || std::abs(y) < 0.01;
  }
  CHECK(through_origin);
}

TEST_CASE("level curve errors and symmetry") {
  const HarmonicTuple H = example211();
  try {
    trace_level_curve(H, 1, 1, 0.0, 0.0);
    FAIL("expected DegenerateCurve");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_curve);
  }
  // H1 - H2 has a critical point at z = -2
  try {
    trace_level_curve(H, 0, 1, 0.0, -2.0);
    FAIL("expected GradientStall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::gradient_stall);
  }
  TraceOptions opts;
  opts.arclength_budget = 0.3;
  const LevelCurve a = trace_level_curve(H, 1, 2, 0.01, cplx(0.0, 0.2), opts);
  const LevelCurve b = trace_level_curve(H, 2, 1, -0.01, cplx(0.0, 0.2), opts);
  CHECK(hausdorff(a.points, b.points) < tol::trace);
}

TEST_CASE("closed level curves are detected") {
  // y^2 = 1/z^2: g = +-1/z, H1 - H2 = +-4 log|z| has circular level sets
  const BivariatePolynomial Q({Poly{-1.0}, Poly{}, Poly{0.0, 0.0, 1.0}});
  const HarmonicTuple T(Q, 1.0);
  TraceOptions opts;
  opts.max_step = 0.05;
  opts.arclength_budget = 20.0;
  const double c = 4.0 * std::log(1.5);
  const int i = T.base_labels()[0].real() > 0 ? 0 : 1;
  const LevelCurve L = trace_level_curve(T, i, 1 - i, c, 1.5, opts);
  CHECK(L.closed);
  CHECK(L.max_residual() < tol::trace);
  for (cplx z : L.points) CHECK(std::abs(std::abs(z) - 1.5) < 1e-9);
}

TEST_CASE("sector decomposition counts") {
  const HarmonicTuple lin = HarmonicTuple::from_branches({Poly{1.0}, Poly{-1.0}});
  auto D = sector_decomposition(lin, 0.0, 0.5);
  CHECK(D.arcs.size() == 2);
  CHECK(D.sectors.size() == 2);

  const HarmonicTuple quad = HarmonicTuple::from_branches({Poly{0.0, 1.0}, Poly{0.0}});
  D = sector_decomposition(quad, 0.0, 0.5);
  REQUIRE(D.arcs.size() == 4);
  CHECK(D.sectors.size() == 4);
  const double expect[] = {kPi / 4, 3 * kPi / 4, 5 * kPi / 4, 7 * kPi / 4};
  for (int a = 0; a < 4; ++a) {
    double ang = D.arcs[a].exit_angle;
    CHECK(std::abs(ang - expect[a]) < 1e-9);
  }
  for (const auto& s : D.sectors) {
    // samples sit strictly inside a quadrant sector of x^2 - y^2
    CHECK(std::abs(std::abs(s.sample.real()) - std::abs(s.sample.imag())) > 1e-3);
  }

  const HarmonicTuple cubic = HarmonicTuple::from_branches({Poly{0.0, 0.0, 1.0}, Poly{0.0}});
  D = sector_decomposition(cubic, 0.0, 0.5);
  CHECK(D.sectors.size() == 6);

  D = sector_decomposition(example211(), 0.0, 0.1);
  CHECK(D.arcs.size() == 6);
  CHECK(D.sectors.size() == 6);
  for (const auto& arc : D.arcs) CHECK(arc.curve.max_residual() < tol::trace);
}

TEST_CASE("sector decomposition rejects a second critical point") {
  // g1 - g2 = z (z - 0.5)
  const HarmonicTuple H = HarmonicTuple::from_branches({Poly{0.0, -0.5, 1.0}, Poly{0.0}});
  try {
    sector_decomposition(H, 0.0, 1.0);
    FAIL("expected RadiusTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::radius_too_large);
  }
}

TEST_CASE("tangential order along the imaginary axis") {
  // H1 = 2y, H2 = -2y, H3 = 2x, H4 = -2x
  const HarmonicTuple H =
      HarmonicTuple::from_branches({Poly{cplx(0, -1)}, Poly{cplx(0, 1)}, Poly{1.0}, Poly{-1.0}});
  TraceOptions opts;
  opts.arclength_budget = 0.5;
  const LevelCurve L = trace_level_curve(H, 2, 3, 0.0, 0.0, opts);
  const double len = L.s.back();
  const TangentialOrder t = tangential_order(H, L, 0.0, len);
  // the curve runs downward or upward; both H3 and H4 stay flat
  const bool up = (L.points.back() - L.points.front()).imag() > 0;
  const std::vector<int> expect = up ? std::vector<int>{1, 2, 3, 0} : std::vector<int>{0, 2, 3, 1};
  CHECK(t.order == expect);
  REQUIRE(t.relations.size() == 3);
  CHECK(t.relations[0] == OrderRelation::strict);
  CHECK(t.relations[1] == OrderRelation::equal);
  CHECK(t.relations[2] == OrderRelation::strict);
}

TEST_CASE("tangential order for the collinear triple along H2 = H3") {
  const HarmonicTuple H = example211();
  TraceOptions opts;
  opts.max_step = 0.002;
  opts.arclength_budget = 0.1;
  opts.backward = false;
  const LevelCurve L = trace_level_curve(H, 1, 2, 0.0, cplx(0.0002, 0.04), opts);
  // upper half of the curve, away from the origin
  const TangentialOrder full = tangential_order(H, L, 0.0, L.s.back());
  const TangentialOrder half = tangential_order(H, L, 0.0, 0.5 * L.s.back());
  CHECK(full.order == half.order);
  // H2 - H3 is constant along its own level curve
  for (size_t m = 0; m + 1 < full.order.size(); ++m) {
    const int a = full.order[m], b = full.order[m + 1];
    if ((a == 1 && b == 2) || (a == 2 && b == 1)) CHECK(full.relations[m] == OrderRelation::equal);
    else CHECK(full.relations[m] == OrderRelation::strict);
  }
  // finite-difference oracle at the first sample
  auto H1 = [](double, double) { return 0.0; };
  auto H3 = [](double x, double) { return -x; };
  const cplx z = L.points[1];
  const cplx T = (L.points[2] - L.points[0]) / std::abs(L.points[2] - L.points[0]);
  const double e = 1e-6;
  auto dT = [&](auto f) {
    return (f(z.real() + e * T.real(), z.imag() + e * T.imag()) - f(z.real() - e * T.real(), z.imag() - e * T.imag())) /
           (2 * e);
  };
  const double d[3] = {dT(H1), dT(h2), dT(H3)};
  for (int nu = 0; nu < 3; ++nu) {
    const double got = 2.0 * (L.branches[1][nu] * T).real();
    CHECK(std::abs(got - d[nu]) < 1e-6);
  }
}
