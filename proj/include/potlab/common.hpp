#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace potlab {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Failure categories. `input` covers violated preconditions and malformed
/// data; `numerical` covers algorithms that ran but could not deliver the
/// requested accuracy. The CLI maps them to exit codes 1 and 2.
enum class ErrorKind { input, numerical };

enum class Errc {
  invalid_input,
  not_squarefree,
  leading_coefficient_vanishes,
  no_convergence,
  degenerate_discriminant,
  path_hits_singular_set,
  step_underflow,
  quadrature_no_convergence,
  seed_not_on_curve,
  gradient_stall,
  degenerate_curve,
  radius_too_large,
  order_not_resolved,
  not_collinear,
  not_a_graph,
  too_close_to_support,
  ambiguous_interface,
  circle_exits_grid,
  degenerate_critical,
  critical_value_at_pole,
  ambiguous_exterior_branch,
  continuation_blocked,
  side_collision,
  invalid_tree,
};

std::string_view errc_name(Errc code);
ErrorKind errc_kind(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return errc_kind(code_); }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& detail);

/// Fixed numeric knobs. Every value here is recorded in run manifests.
namespace tol {
inline constexpr int root_max_iter = 200;
inline constexpr double residual = 1e-12;        // fiber residual, relative to coefficient scale
inline constexpr double degenerate = 1e-12;      // |p_k(z)| below this is a degenerate fiber
inline constexpr double min_step = 1e-10;        // continuation step floor
inline constexpr double cluster_rel = 1e-8;      // cluster_tol = cluster_rel * (1 + max|point|)
inline constexpr double quad = 1e-10;
inline constexpr double trace = 1e-9;
inline constexpr double grad_rel = 1e-6;
inline constexpr double stall = 1e-7;
inline constexpr double order_rel = 1e-9;        // order_tol = order_rel * window length
inline constexpr double collinear = 1e-9;
inline constexpr double assemble = 1e-9;
inline constexpr double hull_rel = 1e-10;
inline constexpr double mv_abs = 1e-9;
inline constexpr double mv_curvature_factor = 10.0;
inline constexpr double eval_clearance_rel = 1e-6;
inline constexpr double jump_rel = 1e-8;
inline constexpr double side_eps_rel = 1e-4;
inline constexpr double tv = 1e-6;
inline constexpr double anneal_t0 = 1.0;
inline constexpr double anneal_decay = 0.995;
inline constexpr int default_grid_nodes = 201;
inline constexpr int stokes_samples = 256;
inline constexpr int mean_value_samples = 32;
}  // namespace tol

}  // namespace potlab
