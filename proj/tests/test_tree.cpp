#include <cmath>

#include "doctest.h"
#include "potlab/roots.hpp"
#include "potlab/tree.hpp"

using namespace potlab;

namespace {

const Poly quadratic{0.0, 1.0, 1.0};     // y + y^2
const Poly odd_cubic{0.0, 1.0, 0.0, 1.0};  // y + y^3
const Poly full_cubic{0.0, 1.0, 1.0, 1.0};

AnalyticTree segment_tree() { return star_tree(critical_values(quadratic)); }

}  // namespace

TEST_CASE("critical values") {
  const auto q = critical_values(quadratic);
  REQUIRE(q.size() == 1);
  CHECK(std::abs(q[0] - (-4.0)) < 1e-12);

  const auto c = critical_values(odd_cubic);
  REQUIRE(c.size() == 2);
  // P'(a) = 0 at a = +-i/sqrt(3), P(a) = +-2i/(3 sqrt(3))
  const double v = 3.0 * std::sqrt(3.0) / 2.0;
  CHECK(std::abs(c[0] - cplx(0, -v)) < 1e-12);
  CHECK(std::abs(c[1] - cplx(0, v)) < 1e-12);

  const auto f = critical_values(full_cubic);
  REQUIRE(f.size() == 2);
  // P' = 1 + 2a + 3a^2 vanishes at a = (-1 +- i sqrt 2) / 3
  const Poly d = full_cubic.derivative();
  for (double sgn : {-1.0, 1.0}) {
    const cplx a(-1.0 / 3, sgn * std::sqrt(2.0) / 3);
    CHECK(std::abs(d(a)) < 1e-10);
    const cplx s = 1.0 / full_cubic(a);
    CHECK(std::min(std::abs(f[0] - s), std::abs(f[1] - s)) < 1e-12);
  }

  CHECK_THROWS_AS(critical_values(Poly{1.0, 1.0}), Error);
  CHECK_THROWS_AS(critical_values(Poly{0.0, 0.0, 1.0}), Error);
  CHECK(critical_values(Poly{0.0, 1.0}).empty());
}

TEST_CASE("exterior branch") {
  const auto b = exterior_branch(quadratic, 100.0);
  // alpha* = (-1 + sqrt(1 + 4/z)) / 2
  CHECK(b.value.real() == doctest::Approx((-1.0 + std::sqrt(1.04)) / 2).epsilon(1e-12));
  CHECK(b.value.real() == doctest::Approx(0.0099010).epsilon(1e-5));
  CHECK(std::abs(b.a2 - (-1.0)) < 0.05);
  CHECK(b.max_check < 0.1);
  const auto lin = exterior_branch(Poly{0.0, 1.0}, 10.0);
  CHECK(std::abs(lin.value - 0.1) < 1e-15);
  CHECK(std::abs(lin.a2) < 1e-12);
  CHECK_THROWS_AS(exterior_branch(quadratic, 5.0), Error);
}

TEST_CASE("spline geometry") {
  AnalyticTree T{{0.0, cplx(2, 0)}, {{0, 1, {cplx(2.0 / 3, 0), cplx(4.0 / 3, 0)}}}};
  for (double t : {0.0, 0.2, 0.5, 0.77, 1.0}) {
    CHECK(std::abs(T.point(0, t) - 2.0 * t) < 1e-14);
    CHECK(std::abs(T.tangent(0, t) - 2.0) < 1e-13);
  }
  CHECK(T.length(0) == doctest::Approx(2.0));
  // the spline passes through its control points
  AnalyticTree B{{0.0, cplx(2, 0)}, {{0, 1, {cplx(0.5, 1), cplx(1.5, -1)}}}};
  CHECK(std::abs(B.point(0, 1.0 / 3) - cplx(0.5, 1)) < 1e-14);
  CHECK(std::abs(B.point(0, 2.0 / 3) - cplx(1.5, -1)) < 1e-14);
}

TEST_CASE("tree validation") {
  const std::vector<cplx> need{-4.0, 0.0};
  CHECK(tree_problem(segment_tree(), need).empty());
  // the segment plus a disjoint stub
  AnalyticTree stub = segment_tree();
  stub.nodes.push_back(cplx(1, 1));
  stub.nodes.push_back(cplx(2, 1));
  stub.edges.push_back({2, 3, {}});
  CHECK(!tree_problem(stub, need).empty());
  CHECK_THROWS_AS(validate_tree(stub, need), Error);
  // missing a required point
  CHECK(!tree_problem(segment_tree(), {-4.0, 0.0, 1.0}).empty());
  // crossing arcs
  AnalyticTree cross{{cplx(-1, 0), cplx(1, 0), cplx(0, -1), cplx(0, 1)},
                     {{0, 1, {}}, {2, 3, {}}, {0, 3, {cplx(-2, 2)}}}};
  CHECK(!tree_problem(cross, {}).empty());
  // arcs meeting only at a shared node are fine
  AnalyticTree fork{{0.0, 1.0, cplx(0, 1)}, {{0, 1, {}}, {0, 2, {}}}};
  CHECK(tree_problem(fork, {}).empty());
  // a cycle
  AnalyticTree loop{{0.0, 1.0, cplx(0, 1)}, {{0, 1, {}}, {1, 2, {}}}};
  loop.edges.push_back({2, 0, {}});
  CHECK(!tree_problem(loop, {}).empty());
}

TEST_CASE("segment density") {
  const AnalyticTree T = segment_tree();
  const TreeMeasure m = tree_measure(T, quadratic);
  REQUIRE(m.edges.size() == 1);
  const EdgeDensity& d = m.edges[0];
  CHECK(d.start_exp == 0.5);
  CHECK(d.end_exp == -0.5);
  // density per unit length along [-4, 0]
  double worst = 0.0;
  for (size_t i = 0; i < d.t.size(); ++i) {
    const double x = d.z[i].real();
    const double exact = std::sqrt(4.0 + x) / (kTwoPi * std::sqrt(-x));
    worst = std::max(worst, std::abs(d.f[i] / d.speed[i] - exact) / exact);
  }
  CHECK(worst < 1e-6);
  const TreeScore s = score_tree(m);
  CHECK(std::abs(s.mass - 1.0) < 1e-8);
  CHECK(s.total_variation == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.positivity_defect < 1e-8);
  CHECK(s.objective() < 1e-8);

  // the Cauchy transform recovers the exterior branch
  const BivariatePolynomial P = tree_relation(quadratic);
  for (int n = 0; n < 8; ++n) {
    const cplx z = std::polar(20.0, kTwoPi * (n + 0.3) / 8);
    CHECK(std::abs(tree_cauchy(m, z) - exterior_root(P, z)) < 1e-6);
  }
}

TEST_CASE("reversed orientation gives the same measure") {
  AnalyticTree T{{0.0, -4.0}, {{0, 1, {cplx(-4.0 / 3, 0), cplx(-8.0 / 3, 0)}}}};
  const TreeScore s = score_tree(tree_measure(T, quadratic));
  CHECK(std::abs(s.mass - 1.0) < 1e-8);
  CHECK(s.positivity_defect < 1e-8);
}

TEST_CASE("bent arc is not positive") {
  AnalyticTree T{{-4.0, 0.0}, {{0, 1, {cplx(-2, 1)}}}};
  const TreeScore s = score_tree(tree_measure(T, quadratic));
  CHECK(s.positivity_defect > 0.1);
  CHECK(s.total_variation >= 1.0 - 1e-6);
  // the mass is topological; the spline is only C1 at its knot, which costs
  // the rule some accuracy
  CHECK(std::abs(s.mass - 1.0) < 1e-4);
}

TEST_CASE("cubic star tree") {
  const auto sigma = critical_values(odd_cubic);
  const TreeMeasure m = tree_measure(star_tree(sigma), odd_cubic);
  REQUIRE(m.edges.size() == 2);
  for (const auto& d : m.edges) {
    CHECK(d.start_exp == 0.5);
    CHECK(d.end_exp == doctest::Approx(-1.0 / 3));
  }
  // the side values carry powers of t^(1/3) beyond the Jacobi weight, so the
  // rule converges algebraically here
  const TreeScore s = score_tree(m);
  CHECK(std::abs(s.mass - 1.0) < 1e-4);
  CHECK(s.total_variation >= 1.0 - 1e-4);
  const BivariatePolynomial P = tree_relation(odd_cubic);
  const double R = 20.0;
  for (int n = 0; n < 8; ++n) {
    const cplx z = std::polar(R, kTwoPi * (n + 0.3) / 8);
    CHECK(std::abs(tree_cauchy(m, z) - exterior_root(P, z)) < 1e-6);
  }
}

TEST_CASE("search from the star tree") {
  SearchConfig none;
  none.iterations = 0;
  const SearchResult r0 = search_tree(quadratic, none);
  CHECK(r0.trace.empty());
  CHECK(r0.best.nodes == segment_tree().nodes);
  CHECK(r0.best_score.objective() == r0.initial_objective);

  SearchConfig cfg;
  cfg.iterations = 300;
  const SearchResult a = search_tree(odd_cubic, cfg);
  const SearchResult b = search_tree(odd_cubic, cfg);
  CHECK(a.best_score.objective() <= a.initial_objective);
  CHECK(a.best_score.objective() == b.best_score.objective());
  REQUIRE(a.trace.size() == 300);
  for (size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i].best <= a.trace[i - 1].best);
}

TEST_CASE("search keeps the segment for the quadratic") {
  SearchConfig cfg;
  cfg.iterations = 400;
  const SearchResult r = search_tree(quadratic, cfg);
  CHECK(r.best_score.objective() < 1e-3);
  const std::vector<cplx> exact = tree_points(segment_tree());
  CHECK(hausdorff(tree_points(r.best), exact) < 1e-2);
}
