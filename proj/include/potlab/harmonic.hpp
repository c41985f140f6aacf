#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potlab/algebraic.hpp"

namespace potlab {

/// Branch values g_nu and primitives A_nu = integral of g_nu from the base
/// point, carried to the point z along some path.
struct Frame {
  cplx z;
  std::vector<cplx> g;
  std::vector<cplx> A;
};

/// Harmonic functions H_nu = 2 Re A_nu + c_nu with dH_nu/dz = g_nu.
///
/// Two sources of branches: the roots of an algebraic relation P(z, y) = 0,
/// continued from labelled roots at the base point, or explicitly given
/// entire branches q_nu(z) (polynomials), for which everything is exact.
///
/// Values at z are defined along the canonical path from the base point: the
/// straight segment, with a counterclockwise detour on the circle of radius
/// safety_radius around every singular point it comes near. Results along
/// canonical paths are memoized; the cache is shared between copies and
/// guarded by a mutex, and never changes any returned value.
class HarmonicTuple {
 public:
  HarmonicTuple(BivariatePolynomial P, cplx base, std::vector<cplx> base_labels = {},
                std::vector<double> constants = {});
  static HarmonicTuple from_branches(std::vector<Poly> branches, cplx base = 0.0, std::vector<double> constants = {});

  int size() const { return k_; }
  bool is_explicit() const { return !q_.empty(); }
  cplx base() const { return base_; }
  const std::vector<cplx>& base_labels() const { return labels_; }
  const std::vector<double>& constants() const { return c_; }
  void set_constants(std::vector<double> c);
  /// Explicit branches, empty in algebraic mode.
  const std::vector<Poly>& branch_polynomials() const { return q_; }
  /// Throws InvalidInput in explicit mode when the branches are not distinct.
  const BivariatePolynomial& polynomial() const;
  const SingularSet& singular_set() const { return S_; }

  std::vector<cplx> canonical_path(cplx z) const;
  /// g and A at z along the canonical path.
  Frame frame_at(cplx z) const;
  /// g and A at the end of an arbitrary path starting at the base point.
  Frame frame_along(std::span<const cplx> path) const;
  /// Moves a frame along the straight segment to z (branches continued, not re-solved).
  Frame advance(const Frame& f, cplx z) const;
  /// dg_nu/dz at the frame's point.
  std::vector<cplx> branch_derivatives(const Frame& f) const;

  double value(int nu, const Frame& f) const { return 2.0 * f.A[nu].real() + c_[nu]; }

 private:
  HarmonicTuple() = default;
  Frame integrate_track(const BranchTrack& track, const std::vector<cplx>& A0, double tol) const;

  int k_ = 0;
  cplx base_;
  std::vector<cplx> labels_;
  std::vector<double> c_;
  std::vector<Poly> q_, Q_, dq_;
  std::optional<BivariatePolynomial> P_;
  SingularSet S_;

  struct Cache {
    std::mutex mu;
    std::map<std::pair<double, double>, Frame> frames;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// A_nu(z) along `path` (from the base point to z), or along the canonical
/// path when `path` is empty.
cplx primitive(const HarmonicTuple& H, int nu, cplx z, std::span<const cplx> path = {});
/// 2 Re A_nu(z) + c_nu.
double harmonic_value(const HarmonicTuple& H, int nu, cplx z, std::span<const cplx> path = {});
/// (H_x, H_y) = (2 Re g_nu, -2 Im g_nu).
std::array<double, 2> harmonic_gradient(const HarmonicTuple& H, int nu, cplx z);

// ---------------------------------------------------------------------------
// Level curves of H_i - H_j.

struct LevelCurve {
  int i = 0, j = 0;
  double offset = 0.0;
  std::vector<cplx> points;
  std::vector<double> s;  // arclength from the first point
  std::vector<double> residuals;
  /// Branch values at each point (all k branches, continued along the curve).
  std::vector<std::vector<cplx>> branches;
  bool closed = false;
  /// Why each direction stopped: "budget", "domain", "stall", "closed", "singular".
  std::string stop_backward, stop_forward;

  double max_residual() const;
};

struct TraceOptions {
  double max_step = 0.01;
  double arclength_budget = 1.0;  // per direction
  /// Optional working disk; tracing stops on leaving it.
  std::optional<std::pair<cplx, double>> domain;
  bool forward = true, backward = true;
};

/// Predictor-corrector tracing of {H_i - H_j = c} through a seed point.
/// Errors: DegenerateCurve (i == j or identical branches), GradientStall
/// (gradient below stall_tol at the seed), SeedNotOnCurve.
LevelCurve trace_level_curve(const HarmonicTuple& H, int i, int j, double c, cplx seed, TraceOptions opts = {});

struct SectorArc {
  int i, j;
  double exit_angle;  // angle of the crossing with the circle of radius r/2, in [0, 2 pi)
  LevelCurve curve;   // from the centre out to the exit point
};

struct Sector {
  cplx apex;
  int arc_a, arc_b;  // indices into SectorDecomposition::arcs, counterclockwise order
  int index;
  cplx sample;
};

struct SectorDecomposition {
  cplx center;
  double radius;
  std::vector<SectorArc> arcs;
  std::vector<Sector> sectors;
};

/// Arcs of the level curves {H_i - H_j = (H_i - H_j)(center)} through the
/// centre, sorted by exit angle, with the sectors between consecutive arcs.
/// Errors: RadiusTooLarge.
SectorDecomposition sector_decomposition(const HarmonicTuple& H, cplx center, double radius);

enum class OrderRelation { equal, strict };

struct TangentialOrder {
  std::vector<int> order;                // branch indices, increasing tangential derivative
  std::vector<OrderRelation> relations;  // relations[m] links order[m] and order[m + 1]
  std::vector<double> mean_derivative;   // per branch index
};

/// Orders the tangential derivatives grad H_nu . T along the curve samples
/// with s in [s0, s1]. Errors: OrderNotResolved.
TangentialOrder tangential_order(const HarmonicTuple& H, const LevelCurve& curve, double s0, double s1);

}  // namespace potlab
