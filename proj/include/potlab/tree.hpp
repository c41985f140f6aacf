#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potlab/algebraic.hpp"

namespace potlab {

/// Critical values sigma = {1 / P(a) : P'(a) = 0} of P(y) = y + c2 y^2 + ... + ck y^k.
/// Errors: InvalidInput (P(0) != 0 or P'(0) == 0), DegenerateCritical,
/// CriticalValueAtPole.
std::vector<cplx> critical_values(const Poly& Py);

/// z P(y) - 1 as a relation in (z, y).
BivariatePolynomial tree_relation(const Poly& Py);

/// The branch of z P(y) = 1 behaving like 1/z at infinity, picked on |z| = R.
struct ExteriorBranch {
  double R = 0.0;
  cplx value;         // alpha*(R)
  cplx a2;            // (alpha*(R) - 1/R) R^2, the second Laurent coefficient up to O(1/R)
  double max_check;   // max |z alpha*(z) - 1| over 8 points on |z| = R
};
/// Errors: InvalidInput (R <= 2 max|sigma|), AmbiguousExteriorBranch.
ExteriorBranch exterior_branch(const Poly& Py, double R);

/// The exterior root at a single point: the one nearest 1/z.
cplx exterior_root(const BivariatePolynomial& P, cplx z);

struct TreeEdge {
  int a = 0, b = 0;
  std::vector<cplx> ctrl;  // interior control points, a to b
};

/// An embedded tree whose arcs are Catmull-Rom splines through
/// node a, the control points and node b.
struct AnalyticTree {
  std::vector<cplx> nodes;
  std::vector<TreeEdge> edges;

  /// Control polygon of an edge: node a, ctrl..., node b.
  std::vector<cplx> control_polygon(int e) const;
  /// Point and derivative at parameter t in [0, 1].
  cplx point(int e, double t) const;
  cplx tangent(int e, double t) const;
  /// Dense samples of every edge (per_span points per spline span).
  std::vector<cplx> polyline(int e, int per_span = 16) const;
  double length(int e) const;
};

/// Tree check: connected, acyclic, arcs simple and meeting only at shared
/// endpoints, and every point of `required` a node (within cluster_tol).
/// Returns an empty string when valid, else the reason.
std::string tree_problem(const AnalyticTree& T, const std::vector<cplx>& required);
/// Throws InvalidTree with the reason.
void validate_tree(const AnalyticTree& T, const std::vector<cplx>& required);

/// The star tree joining 0 to each critical value by straight arcs.
AnalyticTree star_tree(const std::vector<cplx>& sigma, int ctrl_per_edge = 2);

/// Complex density of the jump measure along one edge, sampled at the
/// Gauss-Jacobi nodes of the edge parameter t:
///   d mu = (i / 2 pi) (alpha_+ - alpha_-) z'(t) dt,
/// alpha_+ being the limit of alpha* from the side of n = i z' / |z'|.
struct EdgeDensity {
  int edge = 0;
  double start_exp = 0.0, end_exp = 0.0;
  std::vector<double> t, weights;  // sum weights * f approximates the integral of f dt
  std::vector<cplx> z, plus, minus;
  std::vector<cplx> f;             // (i / 2 pi) (plus - minus) z'(t)
  std::vector<double> speed;       // |z'(t)|
};

struct TreeMeasure {
  std::vector<EdgeDensity> edges;
};

struct TreeOptions {
  int nodes_per_edge = 32;
  double side_eps_rel = tol::side_eps_rel;
};

/// Errors: InvalidTree, ContinuationBlocked (no escape route from the tree
/// complement), SideCollision (offset contour meets the tree).
TreeMeasure tree_measure(const AnalyticTree& T, const Poly& Py, TreeOptions opts = {});

/// Cauchy transform of the (complex) tree measure.
cplx tree_cauchy(const TreeMeasure& m, cplx z);

struct TreeScore {
  cplx mass;
  double total_variation = 0.0;
  double positivity_defect = 0.0;
  double objective() const { return positivity_defect + std::abs(mass - 1.0); }
};

TreeScore score_tree(const TreeMeasure& m);

struct SearchConfig {
  std::uint64_t seed = 7;
  int iterations = 2000;
  double move_scale = 0.1;   // relative to the diameter of sigma and 0, times temperature
  double rewire_prob = 0.1;
  double t0 = tol::anneal_t0;
  double decay = tol::anneal_decay;
};

struct TraceRow {
  int iteration;
  double objective;  // of the proposal; NaN when it could not be scored
  cplx mass;
  double tv, defect;
  bool accepted;
  double best;  // best objective so far
};

struct SearchResult {
  AnalyticTree best;
  TreeScore best_score;
  double initial_objective;
  std::vector<TraceRow> trace;
};

/// Simulated annealing over embedded trees on sigma, 0 and up to k - 2
/// Steiner points. Deterministic for a given seed.
SearchResult search_tree(const Poly& Py, SearchConfig cfg = {});

/// Symmetric Hausdorff distance between two point samples.
double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b);
/// Dense samples of all edges of a tree.
std::vector<cplx> tree_points(const AnalyticTree& T, int per_span = 16);

}  // namespace potlab
