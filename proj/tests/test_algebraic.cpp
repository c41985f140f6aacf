#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "potlab/algebraic.hpp"
#include "potlab/roots.hpp"

using namespace potlab;

namespace {

BivariatePolynomial sqrt_curve() {  // y^2 - z
  return BivariatePolynomial({Poly{0.0, -1.0}, Poly{}, Poly{1.0}});
}

BivariatePolynomial example51() {  // z y^2 + z y - 1
  return BivariatePolynomial({Poly{-1.0}, Poly{0.0, 1.0}, Poly{0.0, 1.0}});
}

BivariatePolynomial cubic_tree() {  // z (y^3 + y) - 1
  return BivariatePolynomial({Poly{-1.0}, Poly{0.0, 1.0}, Poly{}, Poly{0.0, 1.0}});
}

double scaled_residual(const BivariatePolynomial& P, cplx z, cplx y) {
  return std::abs(P(z, y)) / (std::abs(P.coeff(P.degree_y())(z)) * std::pow(std::max(1.0, std::abs(y)), P.degree_y()));
}

bool has_point(const SingularSet& S, cplx z, SingularKind kind, double tol) {
  return std::any_of(S.points.begin(), S.points.end(),
                     [&](const SingularPoint& p) { return std::abs(p.z - z) < tol && p.kind == kind; });
}

}  // namespace

TEST_CASE("solve_fiber on small fibers") {
  auto r = solve_fiber(sqrt_curve(), 4.0);
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0] + 2.0) < 1e-14);
  CHECK(std::abs(r[1] - 2.0) < 1e-14);

  const auto P = example51();
  r = solve_fiber(P, -4.0);
  REQUIRE(r.size() == 2);
  for (cplx y : r) {
    CHECK(std::abs(y + 0.5) < 1e-7);
    CHECK(scaled_residual(P, -4.0, y) < tol::residual);
  }

  const BivariatePolynomial lin({Poly{-1.0}, Poly{0.0, 1.0}});
  r = solve_fiber(lin, 2.0);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0] - 0.5) < 1e-15);
  CHECK_THROWS_AS(solve_fiber(lin, 0.0), Error);
  try {
    solve_fiber(lin, 0.0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::leading_coefficient_vanishes);
  }
}

TEST_CASE("solve_fiber is stable under perturbed seeds") {
  const auto P = cubic_tree();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const cplx z(4 * u(rng), 4 * u(rng));
    auto base = solve_fiber(P, z);
    std::vector<cplx> seeds = base;
    for (auto& s : seeds) s += cplx(1e-3 * u(rng), 1e-3 * u(rng));
    auto again = polynomial_roots(P.fiber(z), seeds);
    sort_lexicographic(again);
    for (size_t i = 0; i < base.size(); ++i) CHECK(std::abs(base[i] - again[i]) < 1e-10);
  }
}

TEST_CASE("squarefree check rejects repeated factors") {
  // (y - z)^2 = y^2 - 2 z y + z^2
  CHECK_THROWS_AS(BivariatePolynomial({Poly{0.0, 0.0, 1.0}, Poly{0.0, -2.0}, Poly{1.0}}), Error);
  CHECK_THROWS_AS(BivariatePolynomial({Poly{1.0}}), Error);
}

TEST_CASE("discriminant nodes") {
  auto S = discriminant_nodes(example51());
  CHECK(S.points.size() == 2);
  CHECK(has_point(S, 0.0, SingularKind::leading_coeff_zero, 1e-10));
  CHECK(has_point(S, -4.0, SingularKind::discriminant_zero, 1e-10));
  CHECK(S.safety_radius == doctest::Approx(1.0));

  S = discriminant_nodes(sqrt_curve());
  CHECK(S.points.size() == 1);
  CHECK(has_point(S, 0.0, SingularKind::discriminant_zero, 1e-10));

  // critical values of y + y^3: alpha = +-i/sqrt(3), z = 1/(alpha + alpha^3)
  S = discriminant_nodes(cubic_tree());
  CHECK(S.points.size() == 3);
  CHECK(has_point(S, 0.0, SingularKind::leading_coeff_zero, 1e-10));
  for (cplx alpha : {cplx(0, 1 / std::sqrt(3.0)), cplx(0, -1 / std::sqrt(3.0))}) {
    const cplx z = 1.0 / (alpha + alpha * alpha * alpha);
    CHECK(has_point(S, z, SingularKind::discriminant_zero, 1e-9));
    const auto P = cubic_tree();
    CHECK(std::abs(P.resultant_at(z)) / P.resultant_bound(z) < tol::residual);
  }
}

TEST_CASE("square-root monodromy") {
  const auto P = sqrt_curve();
  const auto loop = circle_path(0.0, 1.0, 64);
  const BranchTrack t = continue_branches(P, loop);
  CHECK(t.closed);
  CHECK(cycle_notation(t.end_permutation) == "(1 2)");
  CHECK(t.max_residual(P) < tol::residual);
  CHECK(t.vertex_sample.size() == loop.size());

  CHECK(is_identity(monodromy(P, 4.0, circle_path(3.0, 1.0, 64))));
}

TEST_CASE("segment continuation keeps labels") {
  const auto P = sqrt_curve();
  const std::vector<cplx> path{1.0, 4.0};
  const BranchTrack t = continue_branches(P, path);
  CHECK(std::abs(t.samples.back().roots[0] + 2.0) < 1e-12);
  CHECK(std::abs(t.samples.back().roots[1] - 2.0) < 1e-12);
  CHECK(is_identity(t.end_permutation));
  CHECK(t.samples.back().t == 1.0);
}

TEST_CASE("simple branch points give transpositions, stable under refinement") {
  const auto P = example51();
  const BranchTrack t = continue_branches(P, circle_path(-4.0, 1.0, 64));
  CHECK(cycle_notation(t.end_permutation) == "(1 2)");
  CHECK(t.max_residual(P) < tol::residual);

  const auto Q = cubic_tree();
  const cplx centre(0.0, 1.5 * std::sqrt(3.0));
  for (int n : {64, 128}) {
    const auto loop = circle_path(centre, 1.0, n);
    const Permutation p = monodromy(Q, loop.front(), loop);
    CHECK(cycle_type(p) == std::vector<int>{2});
  }
}

TEST_CASE("factorization residual along random polylines") {
  const auto P = example51();
  const SingularSet S = discriminant_nodes(P);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::uniform_real_distribution<double> unit(0.0, kTwoPi);
  int made = 0;
  while (made < 20) {
    std::vector<cplx> path{cplx(u(rng), u(rng))};
    bool ok = S.distance(path[0]) > S.safety_radius;
    for (int i = 0; i < 6 && ok; ++i) {
      path.push_back(cplx(u(rng), u(rng)));
      ok = S.segment_distance(path[i], path[i + 1]) > S.safety_radius;
    }
    if (!ok) continue;
    ++made;
    const BranchTrack t = continue_branches(P, S, path);
    for (const auto& s : t.samples) {
      const cplx lead = P.coeff(2)(s.z);
      for (int probe = 0; probe < 5; ++probe) {
        const cplx y = std::polar(1.0, unit(rng));
        cplx prod = lead;
        for (cplx a : s.roots) prod *= (y - a);
        CHECK(std::abs(prod - P(s.z, y)) < 1e-9 * P.scale(s.z));
      }
    }
  }
}

TEST_CASE("continuation refuses paths through the singular set") {
  const auto P = sqrt_curve();
  const std::vector<cplx> through{cplx(-1.0, 0.1), cplx(1.0, 0.1)};
  CHECK_THROWS_AS(continue_branches(P, through), Error);
  ContinuationOptions opts;
  opts.clearance = 0.0;
  const std::vector<cplx> grazing{cplx(-1.0, 1e-12), cplx(1.0, 1e-12)};
  try {
    continue_branches(P, grazing, {}, opts);
    FAIL("expected StepUnderflow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::step_underflow);
  }
}
