#include "potlab/common.hpp"

namespace potlab {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_input: return "InvalidInput";
    case Errc::not_squarefree: return "NotSquarefree";
    case Errc::leading_coefficient_vanishes: return "LeadingCoefficientVanishes";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::degenerate_discriminant: return "DegenerateDiscriminant";
    case Errc::path_hits_singular_set: return "PathHitsSingularSet";
    case Errc::step_underflow: return "StepUnderflow";
    case Errc::quadrature_no_convergence: return "QuadratureNoConvergence";
    case Errc::seed_not_on_curve: return "SeedNotOnCurve";
    case Errc::gradient_stall: return "GradientStall";
    case Errc::degenerate_curve: return "DegenerateCurve";
    case Errc::radius_too_large: return "RadiusTooLarge";
    case Errc::order_not_resolved: return "OrderNotResolved";
    case Errc::not_collinear: return "NotCollinear";
    case Errc::not_a_graph: return "NotAGraph";
    case Errc::too_close_to_support: return "TooCloseToSupport";
    case Errc::ambiguous_interface: return "AmbiguousInterface";
    case Errc::circle_exits_grid: return "CircleExitsGrid";
    case Errc::degenerate_critical: return "DegenerateCritical";
    case Errc::critical_value_at_pole: return "CriticalValueAtPole";
    case Errc::ambiguous_exterior_branch: return "AmbiguousExteriorBranch";
    case Errc::continuation_blocked: return "ContinuationBlocked";
    case Errc::side_collision: return "SideCollision";
    case Errc::invalid_tree: return "InvalidTree";
  }
  return "Unknown";
}

ErrorKind errc_kind(Errc code) {
  switch (code) {
    case Errc::invalid_input:
    case Errc::not_squarefree:
    case Errc::leading_coefficient_vanishes:
    case Errc::degenerate_discriminant:
    case Errc::path_hits_singular_set:
    case Errc::seed_not_on_curve:
    case Errc::degenerate_curve:
    case Errc::not_collinear:
    case Errc::not_a_graph:
    case Errc::too_close_to_support:
    case Errc::circle_exits_grid:
    case Errc::degenerate_critical:
    case Errc::critical_value_at_pole:
    case Errc::invalid_tree:
      return ErrorKind::input;
    default:
      return ErrorKind::numerical;
  }
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

void fail(Errc code, const std::string& detail) { throw Error(code, detail); }

}  // namespace potlab
