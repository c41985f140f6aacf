#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "potlab/harmonic.hpp"

namespace potlab {

double LevelCurve::max_residual() const {
  double r = 0.0;
  for (double v : residuals) r = std::max(r, v);
  return r;
}

namespace {

struct Difference {
  const HarmonicTuple& H;
  int i, j;
  double c;

  double f(const Frame& F) const { return H.value(i, F) - H.value(j, F) - c; }
  cplx G(const Frame& F) const { return F.g[i] - F.g[j]; }
  cplx dG(const Frame& F) const {
    const auto d = H.branch_derivatives(F);
    return d[i] - d[j];
  }
};

// Newton along the gradient: z -= f / (2 G), since grad f = 2 conj(G).
bool correct(const Difference& D, Frame& F, double max_shift) {
  const cplx start = F.z;
  for (int it = 0; it < 12; ++it) {
    const double v = D.f(F);
    if (std::abs(v) <= 0.1 * tol::trace) return true;
    const cplx G = D.G(F);
    if (std::abs(G) == 0.0) return false;
    const cplx dz = -v / (2.0 * G);
    if (std::abs(F.z + dz - start) > max_shift) return false;
    F = D.H.advance(F, F.z + dz);
  }
  return std::abs(D.f(F)) <= tol::trace;
}

struct Leg {
  std::vector<Frame> frames;
  std::string stop;
};

// One direction of predictor-corrector tracing from F0. `dir` = +1 follows
// T = i conj(G)/|G|, -1 the opposite. `done(z)` ends the leg early.
Leg trace_leg(const Difference& D, const Frame& F0, int dir, const TraceOptions& opts,
              const std::function<bool(const Frame&, double)>& done) {
  Leg leg;
  Frame F = F0;
  double travelled = 0.0;
  double h = opts.max_step;
  while (true) {
    if (travelled >= opts.arclength_budget * (1.0 - 1e-12)) {
      leg.stop = "budget";
      break;
    }
    const cplx G = D.G(F);
    if (2.0 * std::abs(G) < tol::stall) {
      leg.stop = "stall";
      break;
    }
    const cplx T = cplx(0.0, static_cast<double>(dir)) * std::conj(G) / std::abs(G);
    const double kappa = std::abs(D.dG(F)) / std::abs(G);
    h = std::min({2.0 * h, opts.max_step, opts.arclength_budget - travelled});
    if (kappa > 0.0) h = std::min(h, 0.1 / kappa);
    bool accepted = false;
    Frame next;
    while (!accepted) {
      if (h < 1e-13 * (1.0 + std::abs(F.z))) break;
      try {
        next = D.H.advance(F, F.z + h * T);
        if (correct(D, next, 0.5 * h) && ((next.z - F.z) * std::conj(T)).real() > 0.0) accepted = true;
      } catch (const Error& e) {
        if (e.code() != Errc::path_hits_singular_set && e.code() != Errc::step_underflow &&
            e.code() != Errc::no_convergence)
          throw;
      }
      if (!accepted) h *= 0.5;
    }
    if (!accepted) {
      leg.stop = D.H.is_explicit() || D.H.singular_set().distance(F.z) > D.H.singular_set().safety_radius
                     ? "stall"
                     : "singular";
      break;
    }
    if (opts.domain && std::abs(next.z - opts.domain->first) > opts.domain->second) {
      leg.stop = "domain";
      break;
    }
    travelled += std::abs(next.z - F.z);
    F = next;
    leg.frames.push_back(F);
    if (done(F, h)) {
      leg.stop = "closed";
      break;
    }
  }
  return leg;
}

Frame seed_frame(const Difference& D, cplx seed) {
  Frame F = D.H.frame_at(seed);
  if (2.0 * std::abs(D.G(F)) <= tol::stall) {
    std::ostringstream msg;
    msg << "gradient of H_" << D.i + 1 << " - H_" << D.j + 1 << " vanishes at the seed " << seed;
    fail(Errc::gradient_stall, msg.str());
  }
  const double scale = 1.0 / (2.0 * std::abs(D.G(F)));
  if (!correct(D, F, std::max(1e-2, 100.0 * std::abs(D.f(F)) * scale))) {
    std::ostringstream msg;
    msg << "Newton correction from " << seed << " did not reach the level curve";
    fail(Errc::seed_not_on_curve, msg.str());
  }
  return F;
}

void check_pair(const HarmonicTuple& H, int i, int j) {
  if (i < 0 || j < 0 || i >= H.size() || j >= H.size()) fail(Errc::invalid_input, "branch index out of range");
  if (i == j) fail(Errc::degenerate_curve, "H_i - H_j vanishes identically (i == j)");
  if (H.is_explicit() && H.branch_polynomials()[i] == H.branch_polynomials()[j])
    fail(Errc::degenerate_curve, "branches i and j coincide; H_i - H_j is constant");
}

LevelCurve assemble(const Difference& D, const std::vector<Frame>& frames) {
  LevelCurve L;
  L.i = D.i;
  L.j = D.j;
  L.offset = D.c;
  double s = 0.0;
  for (size_t m = 0; m < frames.size(); ++m) {
    if (m > 0) s += std::abs(frames[m].z - frames[m - 1].z);
    L.points.push_back(frames[m].z);
    L.s.push_back(s);
    L.residuals.push_back(std::abs(D.f(frames[m])));
    L.branches.push_back(frames[m].g);
  }
  return L;
}

}  // namespace

LevelCurve trace_level_curve(const HarmonicTuple& H, int i, int j, double c, cplx seed, TraceOptions opts) {
  check_pair(H, i, j);
  const Difference D{H, i, j, c};
  const Frame F0 = seed_frame(D, seed);

  bool closed = false;
  Leg fwd, bwd;
  if (opts.forward) {
    int steps = 0;
    fwd = trace_leg(D, F0, +1, opts, [&](const Frame& F, double h) {
      // back at the seed after leaving it
      closed = ++steps > 4 && std::abs(F.z - F0.z) < 0.75 * h;
      return closed;
    });
  }
  if (opts.backward && !closed) {
    bwd = trace_leg(D, F0, -1, opts, [](const Frame&, double) { return false; });
  }
  std::vector<Frame> frames(bwd.frames.rbegin(), bwd.frames.rend());
  frames.push_back(F0);
  frames.insert(frames.end(), fwd.frames.begin(), fwd.frames.end());
  if (closed) frames.push_back(F0);
  LevelCurve L = assemble(D, frames);
  L.closed = closed;
  L.stop_forward = opts.forward ? fwd.stop : "none";
  L.stop_backward = closed ? "closed" : (opts.backward ? bwd.stop : "none");
  return L;
}

// ---------------------------------------------------------------------------

namespace {

// Frames at n equally spaced angles on the circle of radius rho.
std::vector<Frame> circle_frames(const HarmonicTuple& H, const Frame& centre, double rho, int n) {
  std::vector<Frame> out;
  out.reserve(n);
  Frame F = H.advance(centre, centre.z + rho);
  out.push_back(F);
  for (int m = 1; m < n; ++m) {
    F = H.advance(F, centre.z + std::polar(rho, kTwoPi * m / n));
    out.push_back(F);
  }
  return out;
}

int winding(const std::vector<cplx>& values) {
  double total = 0.0;
  for (size_t m = 0; m < values.size(); ++m) {
    const cplx a = values[m], b = values[(m + 1) % values.size()];
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

double crossing_angle_at(const LevelCurve& arc, cplx centre, double rho) {
  for (size_t m = 0; m + 1 < arc.points.size(); ++m) {
    const double ra = std::abs(arc.points[m] - centre), rb = std::abs(arc.points[m + 1] - centre);
    if ((ra - rho) * (rb - rho) <= 0.0 && ra != rb) {
      const double t = (rho - ra) / (rb - ra);
      return std::arg(arc.points[m] + t * (arc.points[m + 1] - arc.points[m]) - centre);
    }
  }
  return std::arg(arc.points.back() - centre);
}

}  // namespace

SectorDecomposition sector_decomposition(const HarmonicTuple& H, cplx center, double radius) {
  if (!(radius > 0.0)) fail(Errc::invalid_input, "radius must be positive");
  SectorDecomposition out{center, radius, {}, {}};
  const Frame C = H.frame_at(center);
  const int k = H.size();
  const int n_outer = 256, n_exit = 720;
  const std::vector<Frame> outer = circle_frames(H, C, radius, n_outer);
  const std::vector<Frame> inner = circle_frames(H, C, 1e-3 * radius, 64);
  const std::vector<Frame> half = circle_frames(H, C, 0.5 * radius, n_exit);

  double gscale = 0.0;
  for (const auto& F : outer)
    for (cplx g : F.g) gscale = std::max(gscale, std::abs(g));

  TraceOptions topts;
  topts.max_step = radius / 50.0;
  topts.arclength_budget = 3.0 * radius;
  topts.domain = std::pair{center, radius};

  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      std::vector<cplx> Go, Gi;
      double gmax = 0.0;
      for (const auto& F : outer) {
        Go.push_back(F.g[i] - F.g[j]);
        gmax = std::max(gmax, std::abs(Go.back()));
      }
      if (gmax <= 1e-13 * (1.0 + gscale)) continue;  // constant difference: no level curve
      for (const auto& F : inner) Gi.push_back(F.g[i] - F.g[j]);
      for (cplx g : Go)
        if (std::abs(g) == 0.0) fail(Errc::radius_too_large, "critical point on the sampling circle");
      const int w_out = winding(Go), w_in = winding(Gi);
      if (w_out != w_in) {
        std::ostringstream msg;
        msg << "H_" << i + 1 << " - H_" << j + 1 << " has a critical point away from the centre inside the disk";
        fail(Errc::radius_too_large, msg.str());
      }
      const int m = w_in + 1;

      const Difference D{H, i, j, H.value(i, C) - H.value(j, C)};
      std::vector<double> vals;
      for (const auto& F : half) vals.push_back(D.f(F));
      std::vector<SectorArc> found;
      for (int s = 0; s < n_exit; ++s) {
        const int t = (s + 1) % n_exit;
        if ((vals[s] > 0.0) == (vals[t] > 0.0)) continue;
        // bisection on the angle, advancing from the sampled frame
        double lo = kTwoPi * s / n_exit, hi = kTwoPi * (s + 1) / n_exit;
        double flo = vals[s];
        Frame Fm = half[s];
        for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
          const double mid = 0.5 * (lo + hi);
          Fm = H.advance(half[s], center + std::polar(0.5 * radius, mid));
          const double fm = D.f(Fm);
          if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        const double angle = 0.5 * (lo + hi);
        const Frame exit = H.advance(half[s], center + std::polar(0.5 * radius, angle));
        // inward leg: the direction whose tangent points at the centre
        const cplx G = D.G(exit);
        const cplx T = cplx(0.0, 1.0) * std::conj(G) / std::abs(G);
        const int dir = ((center - exit.z) * std::conj(T)).real() > 0.0 ? +1 : -1;
        Frame seed = exit;
        correct(D, seed, 0.1 * topts.max_step);
        const Leg leg = trace_leg(D, seed, dir, topts, [&](const Frame& F, double) {
          return std::abs(F.z - center) < topts.max_step;
        });
        if (leg.stop != "closed") {
          std::ostringstream msg;
          msg << "level curve of H_" << i + 1 << " - H_" << j + 1 << " leaving the circle at angle " << angle
              << " does not reach the centre (" << leg.stop << ")";
          fail(Errc::radius_too_large, msg.str());
        }
        std::vector<Frame> frames{C};
        frames.insert(frames.end(), leg.frames.rbegin(), leg.frames.rend());
        frames.push_back(seed);
        LevelCurve curve = assemble(D, frames);
        found.push_back({i, j, angle, std::move(curve)});
      }
      if (static_cast<int>(found.size()) != 2 * m) {
        std::ostringstream msg;
        msg << "H_" << i + 1 << " - H_" << j + 1 << ": expected " << 2 * m << " arcs, found " << found.size();
        fail(Errc::radius_too_large, msg.str());
      }
      for (auto& a : found) out.arcs.push_back(std::move(a));
    }
  }
  std::sort(out.arcs.begin(), out.arcs.end(),
            [](const SectorArc& a, const SectorArc& b) { return a.exit_angle < b.exit_angle; });

  const size_t na = out.arcs.size();
  for (size_t a = 0; a < na && na >= 2; ++a) {
    const size_t b = (a + 1) % na;
    const double rho = 0.25 * radius;
    const double pa = crossing_angle_at(out.arcs[a].curve, center, rho);
    double gap = crossing_angle_at(out.arcs[b].curve, center, rho) - pa;
    while (gap <= 0.0) gap += kTwoPi;
    out.sectors.push_back(
        {center, static_cast<int>(a), static_cast<int>(b), static_cast<int>(a), center + std::polar(rho, pa + 0.5 * gap)});
  }
  return out;
}

// ---------------------------------------------------------------------------

TangentialOrder tangential_order(const HarmonicTuple& H, const LevelCurve& curve, double s0, double s1) {
  const int k = H.size();
  if (curve.points.size() < 2) fail(Errc::invalid_input, "curve needs at least two samples");
  if (s1 < s0) std::swap(s0, s1);
  std::vector<std::vector<double>> d(k);
  const size_t n = curve.points.size();
  for (size_t m = 0; m < n; ++m) {
    if (curve.s[m] < s0 || curve.s[m] > s1) continue;
    const size_t a = m == 0 ? 0 : m - 1, b = m + 1 == n ? m : m + 1;
    cplx chord = curve.points[b] - curve.points[a];
    if (std::abs(chord) == 0.0) continue;
    // exact tangent of the traced curve, oriented along the samples
    const cplx G = curve.branches[m][curve.i] - curve.branches[m][curve.j];
    cplx T = chord / std::abs(chord);
    if (std::abs(G) > 0.0) {
      const cplx exact = cplx(0.0, 1.0) * std::conj(G) / std::abs(G);
      T = (exact * std::conj(chord)).real() >= 0.0 ? exact : -exact;
    }
    for (int nu = 0; nu < k; ++nu) d[nu].push_back(2.0 * (curve.branches[m][nu] * T).real());
  }
  if (d[0].empty()) fail(Errc::invalid_input, "window contains no curve samples");
  TangentialOrder out;
  for (int nu = 0; nu < k; ++nu) {
    double mean = 0.0;
    for (double v : d[nu]) mean += v;
    out.mean_derivative.push_back(mean / d[nu].size());
  }
  out.order.resize(k);
  for (int nu = 0; nu < k; ++nu) out.order[nu] = nu;
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int a, int b) { return out.mean_derivative[a] < out.mean_derivative[b]; });
  const double order_tol = tol::order_rel * std::max(s1 - s0, 0.0);
  for (int m = 0; m + 1 < k; ++m) {
    const int a = out.order[m], b = out.order[m + 1];
    double lo = INFINITY, hi = -INFINITY;
    for (size_t q = 0; q < d[a].size(); ++q) {
      const double diff = d[b][q] - d[a][q];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    if (std::max(std::abs(lo), std::abs(hi)) < std::max(order_tol, 1e-300)) {
      out.relations.push_back(OrderRelation::equal);
    } else if (lo > -order_tol) {
      out.relations.push_back(OrderRelation::strict);
    } else {
      std::ostringstream msg;
      msg << "tangential derivatives of H_" << a + 1 << " and H_" << b + 1 << " change order within the window";
      fail(Errc::order_not_resolved, msg.str());
    }
  }
  return out;
}

}  // namespace potlab
