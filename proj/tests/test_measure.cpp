#include <cmath>
#include <random>

#include "doctest.h"
#include "potlab/measure.hpp"

using namespace potlab;

namespace {

Measure atom_at_zero() { return {{{0.0, 1.0}}, {}}; }

Measure uniform_interval() {
  return {{}, {gauss_jacobi_arc({-1.0, 1.0}, 64, 0.0, 0.0, [](cplx) { return 0.5; })}};
}

// density sqrt(4 + x) / (2 pi sqrt(-x)) on [-4, 0]
Measure tree_segment() {
  auto f = [](cplx z) { return std::sqrt(4.0 + z.real()) / (kTwoPi * std::sqrt(-z.real())); };
  return {{}, {gauss_jacobi_arc({-4.0, 0.0}, 64, 0.5, -0.5, f)}};
}

cplx exterior_branch(cplx z) { return (-1.0 + std::sqrt(1.0 + 4.0 / z)) / 2.0; }

// x = -4 cos^2(phi) turns the segment integral into (4/pi) int_0^{pi/2} f sin^2(phi) dphi;
// composite Simpson on the smooth integrand.
double segment_oracle(const std::function<double(double)>& f) {
  const int n = 20000;
  const double a = 0.0, b = kPi / 2, h = (b - a) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double phi = a + i * h;
    const double v = f(-4.0 + 4.0 * std::sin(phi) * std::sin(phi)) * std::sin(phi) * std::sin(phi);
    sum += v * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return 4.0 / kPi * sum * h / 3.0;
}

cplx wirtinger_twice(const Measure& mu, cplx z) {
  const double e = 1e-5;
  const double vx = (log_potential(mu, z + e) - log_potential(mu, z - e)) / (2 * e);
  const double vy = (log_potential(mu, z + cplx(0, e)) - log_potential(mu, z - cplx(0, e))) / (2 * e);
  return {vx, -vy};
}

LevelCurve half_curve(const HarmonicTuple& H, int i, int j, bool forward, double radius) {
  TraceOptions o;
  o.max_step = 1e-3;
  o.arclength_budget = 3 * radius;
  o.domain = std::pair<cplx, double>{0.0, 1.1 * radius};
  o.forward = forward;
  o.backward = !forward;
  return trace_level_curve(H, i, j, 0.0, 0.0, o);
}

}  // namespace

TEST_CASE("transforms of an atom") {
  const Measure mu = atom_at_zero();
  for (cplx z : {cplx(1, 0), cplx(2, 1), cplx(-0.3, 0.4)}) {
    CHECK(std::abs(cauchy_transform(mu, z) - 1.0 / z) < 1e-15);
    CHECK(log_potential(mu, z) == doctest::Approx(std::log(std::abs(z))));
  }
  const cplx z(2, 1);
  CHECK(std::abs(wirtinger_twice(mu, z) - 1.0 / z) < 1e-8);
  CHECK_THROWS_AS(cauchy_transform(mu, 0.0), Error);
}

TEST_CASE("uniform interval") {
  const Measure mu = uniform_interval();
  CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cauchy_transform(mu, 2.0).real() == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-13));
  for (cplx z : {cplx(0.3, 0.5), cplx(-2, 1), cplx(1.5, -0.1)}) {
    const cplx exact = 0.5 * std::log((z + 1.0) / (z - 1.0));
    CHECK(std::abs(cauchy_transform(mu, z) - exact) < 1e-9);
  }
  // the same measure as a trapezoid arc
  Measure t{{}, {Arc{{-1.0, 0.0, 1.0}, {0.5, 0.5, 0.5}}}};
  CHECK(t.total_mass() == doctest::Approx(1.0));
  CHECK(std::abs(cauchy_transform(t, 20.0) - cauchy_transform(mu, 20.0)) < 1e-3);
  CHECK_THROWS_AS(log_potential(mu, cplx(0.5, 0.0)), Error);
}

TEST_CASE("tree segment measure") {
  const Measure mu = tree_segment();
  CHECK(std::abs(mu.total_mass() - 1.0) < 1e-10);
  CHECK(cauchy_transform(mu, 10.0).real() == doctest::Approx((-1.0 + std::sqrt(1.4)) / 2).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(5.0, 50.0), t(0.0, kTwoPi);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const cplx z = std::polar(r(rng), t(rng));
    worst = std::max(worst, std::abs(cauchy_transform(mu, z) - exterior_branch(z)) / std::abs(exterior_branch(z)));
  }
  CHECK(worst < 1e-8);

  const double oracle = segment_oracle([](double x) { return std::log(std::abs(10.0 - x)); });
  CHECK(log_potential(mu, 10.0) == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(segment_oracle([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("algebraic relation") {
  const BivariatePolynomial linear({Poly{-1.0}, Poly{0.0, 1.0}});
  const BivariatePolynomial quad({Poly{-1.0}, Poly{0.0, 1.0}, Poly{0.0, 1.0}});
  std::vector<cplx> ring;
  for (int n = 0; n < 50; ++n) ring.push_back(std::polar(8.0, kTwoPi * (n + 0.5) / 50));
  CHECK(verify_algebraic_relation(linear, atom_at_zero(), ring) < 1e-15);
  CHECK(verify_algebraic_relation(quad, tree_segment(), ring) < 1e-8);
  CHECK(verify_algebraic_relation(linear, uniform_interval(), ring) > 1e-4);
}

TEST_CASE("transform properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const Measure& mu : {uniform_interval(), tree_segment()}) {
    const double M = mu.total_mass(), D = mu.diameter();
    for (int n = 0; n < 20; ++n) {
      const cplx w(u(rng), u(rng));
      const cplx z = (10.5 * D + 20.0 * std::abs(u(rng))) * w / std::abs(w);
      CHECK(std::abs(z * cauchy_transform(mu, z) - M) < 10 * M * D / std::abs(z));
      const cplx q(3 * u(rng), 3 * u(rng) + 0.01);
      CHECK(std::abs(cauchy_transform(mu, std::conj(q)) - std::conj(cauchy_transform(mu, q))) < 1e-13);
    }
  }
}

TEST_CASE("potential gradient matches the transform") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (const Measure& mu : {atom_at_zero(), uniform_interval(), tree_segment()}) {
    for (int n = 0; n < 50; ++n) {
      cplx z;
      do z = {u(rng), u(rng)};
      while (mu.distance_to_support(z) < 0.2);
      const cplx c = cauchy_transform(mu, z);
      CHECK(std::abs(wirtinger_twice(mu, z) - c) < 1e-6 * std::abs(c));
    }
  }
}

TEST_CASE("measure validation") {
  Measure bad{{{0.0, -1.0}}, {}};
  CHECK_THROWS_AS(bad.validate(), Error);
  Measure ok = tree_segment();
  CHECK_NOTHROW(ok.validate());
  ok.arcs[0].density[3] = -0.1;
  CHECK_THROWS_AS(ok.validate(), Error);
}

TEST_CASE("jump densities") {
  // max(0, 2x): lambda = 2 along the imaginary axis
  const auto ramp = HarmonicTuple::from_branches({Poly{0.0}, Poly{1.0}});
  const Grid g = Grid::square(0.0, 2.2, 221);
  const auto F = max_configuration(ramp, {0, 1}, g);
  std::vector<LevelCurve> curves{half_curve(ramp, 0, 1, true, 1.0), half_curve(ramp, 0, 1, false, 1.0)};
  const auto R = jump_density(F, ramp, curves);
  REQUIRE(R.interfaces.size() == 2);
  for (const auto& d : R.interfaces) {
    CHECK(d.active());
    for (double l : d.lambda) CHECK(l == doctest::Approx(2.0));
  }
  const std::pair<cplx, double> unit{0.0, 1.0};
  CHECK(R.mass(unit) == doctest::Approx(2.0 / kPi).epsilon(1e-12));
  CHECK(std::abs(stokes_mass(F, 0.0, 1.0) - 2.0 / kPi) < 1e-6);

  // min(0, 2x) gives a negative density
  const auto Fmin = min_configuration(ramp, {0, 1}, g);
  CHECK(jump_density(Fmin, ramp, curves).min_lambda() == doctest::Approx(-2.0));

  // 2|x| = max(0, 2x, -2x): the curve {H1 = H2} carries no interface
  const auto vee = HarmonicTuple::from_branches({Poly{0.0}, Poly{1.0}, Poly{-1.0}});
  const auto V = max_configuration(vee, {0, 1, 2}, g);
  std::vector<LevelCurve> c01{half_curve(vee, 0, 1, true, 1.0)}, c12{half_curve(vee, 1, 2, true, 1.0)};
  const auto none = jump_density(V, vee, c01);
  CHECK(!none.interfaces[0].active());
  CHECK(none.mass() == 0.0);
  const auto kink = jump_density(V, vee, c12);
  REQUIRE(kink.interfaces[0].active());
  for (double l : kink.interfaces[0].lambda) CHECK(l == doctest::Approx(4.0));
}

TEST_CASE("mass balance for the collinear triple") {
  const auto H = HarmonicTuple::from_branches({Poly{0.0}, Poly{2.0, 1.0}, Poly{-0.5}});
  const Grid g = Grid::square(0.0, 0.25, 251);
  const double r = 0.1;
  const auto F = max_configuration(H, {0, 1, 2}, g);
  std::vector<LevelCurve> curves;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
    for (bool fwd : {true, false}) curves.push_back(half_curve(H, i, j, fwd, r));
  const auto R = jump_density(F, H, curves);
  int active = 0;
  for (const auto& d : R.interfaces) {
    active += d.active();
    if (d.active()) {
      CHECK(d.a == d.i);  // max type: H_i is active where H_i - H_j grows
      for (size_t m = 0; m < d.points.size(); ++m) {
        const cplx z = d.points[m];
        const double exact = d.b == 1 ? 2 * std::abs(2.0 + z) : 1.0;
        CHECK(d.lambda[m] == doctest::Approx(exact).epsilon(1e-9));
      }
    }
  }
  CHECK(active == 4);
  const double jump = R.mass(std::pair<cplx, double>{0.0, r});
  const double flux = stokes_mass(F, 0.0, r);
  CHECK(jump > 0.0);
  CHECK(std::abs(flux - jump) < 1e-4 * jump);
}

TEST_CASE("stokes mass of potentials") {
  const Grid g = Grid::square(0.0, 3.0, 150);
  const auto F = potential_field(atom_at_zero(), g);
  CHECK(stokes_mass(F, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-4));

  const Grid w = Grid::square(-2.0, 22.0, 200);
  const auto T = potential_field(tree_segment(), w);
  CHECK(stokes_mass(T, -2.0, 10.0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(potential_field(tree_segment(), w, Execution::serial).values == T.values);

  CHECK_THROWS_AS(stokes_mass(F, 0.0, 1.6), Error);
}
