#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "potlab/common.hpp"

namespace potlab {

/// Rectangular lattice with equal spacing h in x and y; node (ix, iy) sits at
/// (x0 + ix h, y0 + iy h). Node data is stored row by row (iy major).
struct Grid {
  double x0 = 0.0, y0 = 0.0, h = 1.0;
  int nx = 0, ny = 0;

  /// n x n nodes covering the square of the given side centred at `center`.
  static Grid square(cplx center, double side, int n);

  size_t size() const { return static_cast<size_t>(nx) * static_cast<size_t>(ny); }
  size_t index(int ix, int iy) const { return static_cast<size_t>(iy) * nx + ix; }
  cplx node(int ix, int iy) const { return {x0 + ix * h, y0 + iy * h}; }
  cplx node(size_t idx) const { return node(static_cast<int>(idx % nx), static_cast<int>(idx / nx)); }
  double x_max() const { return x0 + (nx - 1) * h; }
  double y_max() const { return y0 + (ny - 1) * h; }
  cplx center() const { return {0.5 * (x0 + x_max()), 0.5 * (y0 + y_max())}; }
  bool contains(cplx z) const;
};

/// Bilinear interpolation of node values at z (clamped to the grid).
double bilinear(const Grid& g, std::span<const double> values, cplx z);
/// Bicubic (Catmull-Rom) interpolation; one-sided near the border.
double bicubic(const Grid& g, std::span<const double> values, cplx z);

}  // namespace potlab
