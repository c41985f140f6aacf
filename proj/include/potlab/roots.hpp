#pragma once

#include <span>
#include <vector>

#include "potlab/polynomial.hpp"

namespace potlab {

struct RootOptions {
  int max_iter = tol::root_max_iter;
};

/// All roots of p by Aberth-Ehrlich simultaneous iteration followed by a
/// Newton polish. When `guesses` has deg(p) entries they seed the iteration
/// and the returned roots keep their order (root i is the limit of guess i);
/// otherwise the seeds are spread on a circle sized from the coefficients.
/// Throws Errc::no_convergence after max_iter sweeps.
std::vector<cplx> polynomial_roots(const Poly& p, std::span<const cplx> guesses = {}, RootOptions opts = {});

/// Sort by (Re, Im).
void sort_lexicographic(std::vector<cplx>& v);

}  // namespace potlab
