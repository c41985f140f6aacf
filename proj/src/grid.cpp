#include "potlab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace potlab {

Grid Grid::square(cplx center, double side, int n) {
  if (n < 2 || !(side > 0.0)) fail(Errc::invalid_input, "grid needs at least 2 nodes per side and positive size");
  Grid g;
  g.nx = g.ny = n;
  g.h = side / (n - 1);
  g.x0 = center.real() - 0.5 * side;
  g.y0 = center.imag() - 0.5 * side;
  return g;
}

bool Grid::contains(cplx z) const {
  const double eps = 1e-12 * h;
  return z.real() >= x0 - eps && z.real() <= x_max() + eps && z.imag() >= y0 - eps && z.imag() <= y_max() + eps;
}

namespace {

void locate(const Grid& g, cplx z, int& ix, int& iy, double& fx, double& fy) {
  const double u = std::clamp((z.real() - g.x0) / g.h, 0.0, static_cast<double>(g.nx - 1));
  const double v = std::clamp((z.imag() - g.y0) / g.h, 0.0, static_cast<double>(g.ny - 1));
  ix = std::min(static_cast<int>(u), g.nx - 2);
  iy = std::min(static_cast<int>(v), g.ny - 2);
  fx = u - ix;
  fy = v - iy;
}

double cubic(double p0, double p1, double p2, double p3, double t) {
  return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace

double bilinear(const Grid& g, std::span<const double> values, cplx z) {
  int ix, iy;
  double fx, fy;
  locate(g, z, ix, iy, fx, fy);
  const double a = values[g.index(ix, iy)], b = values[g.index(ix + 1, iy)];
  const double c = values[g.index(ix, iy + 1)], d = values[g.index(ix + 1, iy + 1)];
  return (1.0 - fy) * ((1.0 - fx) * a + fx * b) + fy * ((1.0 - fx) * c + fx * d);
}

double bicubic(const Grid& g, std::span<const double> values, cplx z) {
  int ix, iy;
  double fx, fy;
  locate(g, z, ix, iy, fx, fy);
  // shift the 4x4 stencil inward at the border
  int bx = std::clamp(ix - 1, 0, std::max(g.nx - 4, 0));
  int by = std::clamp(iy - 1, 0, std::max(g.ny - 4, 0));
  if (g.nx < 4 || g.ny < 4) return bilinear(g, values, z);
  const double tx = fx + (ix - bx) - 1.0, ty = fy + (iy - by) - 1.0;
  double rows[4];
  for (int r = 0; r < 4; ++r) {
    const size_t base = g.index(bx, by + r);
    rows[r] = cubic(values[base], values[base + 1], values[base + 2], values[base + 3], tx);
  }
  return cubic(rows[0], rows[1], rows[2], rows[3], ty);
}

}  // namespace potlab
