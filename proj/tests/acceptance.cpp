// Acceptance run: one PASS/FAIL line per criterion, each within its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "potlab/measure.hpp"
#include "potlab/tree.hpp"

using namespace potlab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& name, double value) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? ", " : "") << name << '=' << value << (ok ? "" : " (!)");
  }
};

cplx segment_branch(cplx z) { return (-1.0 + std::sqrt(1.0 + 4.0 / z)) / 2.0; }

Measure segment_measure() {
  auto f = [](cplx z) { return std::sqrt(4.0 + z.real()) / (kTwoPi * std::sqrt(-z.real())); };
  return {{}, {gauss_jacobi_arc({-4.0, 0.0}, 64, 0.5, -0.5, f)}};
}

HarmonicTuple triple() { return HarmonicTuple::from_branches({Poly{0.0}, Poly{2.0, 1.0}, Poly{-0.5}}); }

LevelCurve half_curve(const HarmonicTuple& H, int i, int j, bool forward, double radius) {
  TraceOptions o;
  o.max_step = 1e-3;
  o.arclength_budget = 3 * radius;
  o.domain = std::pair<cplx, double>{0.0, 1.1 * radius};
  o.forward = forward;
  o.backward = !forward;
  return trace_level_curve(H, i, j, 0.0, 0.0, o);
}

void segment_transform(Outcome& out) {
  const Measure mu = segment_measure();
  out.check(std::abs(mu.total_mass() - 1.0) < 1e-10, "mass_err", std::abs(mu.total_mass() - 1.0));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> r(5.0, 50.0), t(0.0, kTwoPi);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const cplx z = std::polar(r(rng), t(rng));
    worst = std::max(worst, std::abs(cauchy_transform(mu, z) - segment_branch(z)) / std::abs(segment_branch(z)));
  }
  out.check(worst < 1e-8, "transform_rel_err", worst);
}

void jump_calibration(Outcome& out) {
  const Poly P{0.0, 1.0, 1.0};
  TreeOptions opts;
  opts.nodes_per_edge = 50;
  const TreeMeasure m = tree_measure(star_tree(critical_values(P)), P, opts);
  double worst = 0.0;
  int samples = 0;
  for (const EdgeDensity& d : m.edges)
    for (size_t i = 0; i < d.t.size(); ++i, ++samples) {
      const double x = d.z[i].real();
      const double exact = std::sqrt(4.0 + x) / (kTwoPi * std::sqrt(-x));
      worst = std::max(worst, std::abs(d.f[i] / d.speed[i] - exact) / exact);
    }
  out.check(samples == 50, "samples", samples);
  out.check(worst < 1e-6, "density_rel_err", worst);
  const TreeScore s = score_tree(m);
  out.check(std::abs(s.mass - 1.0) < 1e-8, "mass_err", std::abs(s.mass - 1.0));
  out.check(std::abs(s.total_variation - 1.0) < 1e-8, "tv_err", std::abs(s.total_variation - 1.0));
  out.check(s.positivity_defect < 1e-8, "defect", s.positivity_defect);
}

void configurations(Outcome& out) {
  const auto e2 = enumerate_collinear_configurations(2), e3 = enumerate_collinear_configurations(3),
             e4 = enumerate_collinear_configurations(4);
  const auto mid = std::count_if(e3.begin(), e3.end(), middle_active);
  out.check(e2.size() == 1, "n2", e2.size());
  out.check(e3.size() == 4, "n3", e3.size());
  out.check(mid == 3, "middle_active", mid);
  out.check(e4.size() == 16, "n4", e4.size());
  const HarmonicTuple H = triple();
  const Grid g = Grid::square(0.0, 0.2, 201);
  size_t violations = 0;
  for (const auto& c : e3) violations += verify_subharmonic(assemble_configuration(H, c, g, 0.0)).violations.size();
  out.check(violations == 0, "violations", violations);
  const size_t inverted = verify_subharmonic(min_configuration(H, {0, 2}, g)).violations.size();
  out.check(inverted >= 1, "min_violations", inverted);
}

void mass_balance(Outcome& out) {
  const auto ramp = HarmonicTuple::from_branches({Poly{0.0}, Poly{1.0}});
  const auto F = max_configuration(ramp, {0, 1}, Grid::square(0.0, 2.2, 221));
  std::vector<LevelCurve> c{half_curve(ramp, 0, 1, true, 1.0), half_curve(ramp, 0, 1, false, 1.0)};
  const double jump = jump_density(F, ramp, c).mass(std::pair<cplx, double>{0.0, 1.0});
  const double flux = stokes_mass(F, 0.0, 1.0);
  out.check(std::abs(jump - 2.0 / kPi) < 1e-6, "ramp_jump_err", std::abs(jump - 2.0 / kPi));
  out.check(std::abs(flux - 2.0 / kPi) < 1e-6, "ramp_flux_err", std::abs(flux - 2.0 / kPi));

  const HarmonicTuple H = triple();
  const double r = 0.1;
  const auto T = max_configuration(H, {0, 1, 2}, Grid::square(0.0, 0.25, 251));
  std::vector<LevelCurve> curves;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
    for (bool fwd : {true, false}) curves.push_back(half_curve(H, i, j, fwd, r));
  const double tj = jump_density(T, H, curves).mass(std::pair<cplx, double>{0.0, r});
  const double tf = stokes_mass(T, 0.0, r);
  out.check(std::abs(tf - tj) < 1e-4 * tj, "triple_rel_diff", std::abs(tf - tj) / tj);
}

void monodromy_and_continuation(Outcome& out) {
  const BivariatePolynomial sq({Poly{0.0, -1.0}, Poly{0.0}, Poly{1.0}});
  const Permutation around = monodromy(sq, 1.0, circle_path(0.0, 1.0));
  out.check(around == Permutation{1, 0}, "transposition", around == Permutation{1, 0});
  const BivariatePolynomial tree = BivariatePolynomial::from_inverse_relation(Poly{0.0, 1.0, 1.0});
  const BivariatePolynomial cubic({Poly{1.0}, Poly{0.0, 1.0}, Poly{0.0}, Poly{1.0}});  // y^3 + z y + 1
  bool identity = true;
  for (auto [P, loop] : {std::pair{&sq, circle_path(3.0, 1.0)}, std::pair{&tree, circle_path(cplx(2, 2), 1.0)},
                         std::pair{&cubic, circle_path(cplx(-1, -2), 0.5)}})
    identity = identity && is_identity(monodromy(*P, loop.front(), loop));
  out.check(identity, "identity_loops", identity);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const BivariatePolynomial* polys[] = {&sq, &tree, &cubic};
  double worst = 0.0;
  int done = 0;
  while (done < 20) {
    const BivariatePolynomial& P = *polys[done % 3];
    const SingularSet S = discriminant_nodes(P);
    std::vector<cplx> path;
    for (int v = 0; v < 6; ++v) path.push_back({u(rng), u(rng)});
    bool clear = true;
    for (size_t v = 0; v + 1 < path.size(); ++v) clear = clear && S.segment_distance(path[v], path[v + 1]) > S.safety_radius;
    if (!clear) continue;
    worst = std::max(worst, continue_branches(P, S, path).max_residual(P));
    ++done;
  }
  out.check(worst < 1e-9, "max_residual", worst);
}

void forward_star(Outcome& out) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid g = Grid::square(0.0, 2.0, 81);
  int stars = 0, bounded = 0;
  double worst_margin = -INFINITY;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<cplx> c(3);
    for (auto& x : c) x = {u(rng), u(rng)};
    std::sort(c.begin(), c.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    const auto H = HarmonicTuple::from_branches({Poly{c[0]}, Poly{c[1]}, Poly{c[2]}});
    const auto F = max_configuration(H, {0, 1, 2}, g);
    stars += verify_forward_star(region_of(F, 2), {1, 0});
    const double bound = 1.0 / std::tan(separation_angle(H, 2, g)) + 2 * g.h / 2.0;
    const double L = interface_lipschitz(F, 2);
    bounded += L <= bound;
    worst_margin = std::max(worst_margin, L - bound);
  }
  out.check(stars == 10, "forward_star", stars);
  out.check(bounded == 10, "lipschitz_bounded", bounded);
  out.detail << ", max(L - bound)=" << worst_margin;
}

void gradient_consistency(Outcome& out) {
  const Measure atom{{{0.0, 1.0}}, {}};
  const Measure interval{{}, {gauss_jacobi_arc({-1.0, 1.0}, 64, 0.0, 0.0, [](cplx) { return 0.5; })}};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  double worst = 0.0;
  for (const Measure& mu : {atom, interval, segment_measure()})
    for (int n = 0; n < 50; ++n) {
      cplx z;
      do z = {u(rng), u(rng)};
      while (mu.distance_to_support(z) < 0.2);
      const double e = 1e-5;
      const double vx = (log_potential(mu, z + e) - log_potential(mu, z - e)) / (2 * e);
      const double vy = (log_potential(mu, z + cplx(0, e)) - log_potential(mu, z - cplx(0, e))) / (2 * e);
      const cplx c = cauchy_transform(mu, z);
      worst = std::max(worst, std::abs(cplx(vx, -vy) - c) / std::abs(c));
    }
  out.check(worst < 1e-6, "max_rel_err", worst);
}

void search_smoke(Outcome& out) {
  SearchConfig cfg;
  cfg.seed = 7;
  cfg.iterations = 2000;
  const Poly quad{0.0, 1.0, 1.0};
  const SearchResult a = search_tree(quad, cfg);
  const std::vector<cplx> segment = tree_points(star_tree(critical_values(quad)));
  const double hd = hausdorff(tree_points(a.best), segment);
  out.check(hd < 1e-2, "hausdorff", hd);
  out.check(a.best_score.objective() < 1e-3, "objective", a.best_score.objective());

  const SearchResult b = search_tree(Poly{0.0, 1.0, 0.0, 1.0}, cfg);
  out.check(b.best_score.objective() <= b.initial_objective, "cubic_best_minus_initial",
            b.best_score.objective() - b.initial_objective);
  bool monotone = b.trace.size() == 2000;
  double best = b.initial_objective;
  for (const TraceRow& r : b.trace) {
    if (r.accepted) best = std::min(best, r.objective);
    monotone = monotone && r.best <= best && r.best == best;
  }
  for (size_t i = 1; i < b.trace.size(); ++i) monotone = monotone && b.trace[i].best <= b.trace[i - 1].best;
  out.check(monotone, "trace_monotone", monotone);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> all{
      {1, "segment measure mass and Cauchy transform", 1.0, segment_transform},
      {2, "tree jump density calibration", 5.0, jump_calibration},
      {3, "configuration combinatorics and subharmonicity", 10.0, configurations},
      {4, "Riesz mass balance", 5.0, mass_balance},
      {5, "monodromy and continuation", 5.0, monodromy_and_continuation},
      {6, "forward star and Lipschitz verifiers", 20.0, forward_star},
      {7, "gradient and potential consistency", 2.0, gradient_consistency},
      {8, "tree search smoke test", 60.0, search_smoke},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << (out.detail.tellp() > 0 ? ", " : "") << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = out.pass && secs < c.budget;
    failed += !pass;
    std::printf("[%s] criterion %d: %s (%.2f s of %.0f s) %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
