#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potlab/polynomial.hpp"

namespace potlab {

enum class SingularKind { leading_coeff_zero, discriminant_zero };

struct SingularPoint {
  cplx z;
  SingularKind kind;
};

/// Roots of p_k together with the branch points (zeros of the discriminant).
struct SingularSet {
  std::vector<SingularPoint> points;
  double safety_radius = 0.0;

  /// Distance from z to the nearest point (infinity when empty).
  double distance(cplx z) const;
  /// Distance from the segment [a, b] to the nearest point.
  double segment_distance(cplx a, cplx b) const;
};

/// perm[nu] is the 0-based label, in the reference labeling, of the root that
/// branch nu ends on.
using Permutation = std::vector<int>;

bool is_identity(const Permutation& p);
/// Cycle notation with 1-based labels, fixed points omitted: "(1 2)", "()".
std::string cycle_notation(const Permutation& p);
/// Number of non-trivial cycles and their lengths, largest first.
std::vector<int> cycle_type(const Permutation& p);

struct BranchSample {
  double t;  // normalized arclength along the path
  cplx z;
  std::vector<cplx> roots;
};

struct BranchTrack {
  std::vector<BranchSample> samples;
  /// samples[vertex_sample[i]] sits on path vertex i.
  std::vector<size_t> vertex_sample;
  Permutation end_permutation;
  bool closed = false;

  double max_residual(const BivariatePolynomial& P) const;
};

struct ContinuationOptions {
  double min_step = tol::min_step;
  /// Minimum distance of the path from the singular set; negative means
  /// safety_radius / 2.
  double clearance = -1.0;
};

/// All y with P(z, y) = 0, sorted lexicographically by (Re, Im).
/// Throws LeadingCoefficientVanishes when |p_k(z)| <= degenerate_tol.
std::vector<cplx> solve_fiber(const BivariatePolynomial& P, cplx z);

/// Roots of the fiber at z, labelled to follow `reference` (nearest-neighbour
/// matching, seeded from it). `max_move` receives the largest displacement.
std::vector<cplx> solve_fiber_near(const BivariatePolynomial& P, cplx z, std::span<const cplx> reference,
                                   double* max_move = nullptr);

/// Greedy nearest matching: result[nu] is the candidate assigned to reference[nu].
std::vector<cplx> match_nearest(std::span<const cplx> reference, std::span<const cplx> candidates);

/// Smallest pairwise distance (infinity for fewer than two points).
double min_gap(std::span<const cplx> v);

SingularSet discriminant_nodes(const BivariatePolynomial& P);

/// Continues the k roots along a polyline. Labels start from `start_labels`
/// (which must solve the first fiber) or from the sorted first fiber.
BranchTrack continue_branches(const BivariatePolynomial& P, std::span<const cplx> path,
                              std::span<const cplx> start_labels = {}, ContinuationOptions opts = {});
/// Same, reusing a precomputed singular set.
BranchTrack continue_branches(const BivariatePolynomial& P, const SingularSet& S, std::span<const cplx> path,
                              std::span<const cplx> start_labels = {}, ContinuationOptions opts = {});

/// End permutation of continuation around a loop that starts and ends at base.
Permutation monodromy(const BivariatePolynomial& P, cplx base, std::span<const cplx> loop);

/// Closed polygon with n + 1 vertices (last equals first) on the circle,
/// starting at angle `phase`, counterclockwise.
std::vector<cplx> circle_path(cplx center, double radius, int n = 64, double phase = 0.0);

}  // namespace potlab
