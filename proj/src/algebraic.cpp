#include "potlab/algebraic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "potlab/roots.hpp"

namespace potlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

}  // namespace

double SingularSet::distance(cplx z) const {
  double d = kInf;
  for (const auto& p : points) d = std::min(d, std::abs(z - p.z));
  return d;
}

double SingularSet::segment_distance(cplx a, cplx b) const {
  double d = kInf;
  for (const auto& p : points) d = std::min(d, point_segment_distance(p.z, a, b));
  return d;
}

bool is_identity(const Permutation& p) {
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i)) return false;
  return true;
}

std::string cycle_notation(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  std::ostringstream out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (seen[i] || p[i] == static_cast<int>(i)) continue;
    out << '(';
    size_t j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = 1;
      if (!first) out << ' ';
      out << j + 1;
      first = false;
      j = static_cast<size_t>(p[j]);
    }
    out << ')';
  }
  const std::string s = out.str();
  return s.empty() ? "()" : s;
}

std::vector<int> cycle_type(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  std::vector<int> lengths;
  for (size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (size_t j = i; !seen[j]; j = static_cast<size_t>(p[j])) {
      seen[j] = 1;
      ++len;
    }
    if (len > 1) lengths.push_back(len);
  }
  std::sort(lengths.rbegin(), lengths.rend());
  return lengths;
}

double BranchTrack::max_residual(const BivariatePolynomial& P) const {
  double r = 0.0;
  for (const auto& s : samples)
    for (cplx y : s.roots) r = std::max(r, P.residual(s.z, y));
  return r;
}

double min_gap(std::span<const cplx> v) {
  double g = kInf;
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = i + 1; j < v.size(); ++j) g = std::min(g, std::abs(v[i] - v[j]));
  return g;
}

std::vector<cplx> match_nearest(std::span<const cplx> reference, std::span<const cplx> candidates) {
  const size_t n = reference.size();
  if (candidates.size() != n) fail(Errc::invalid_input, "matching needs equally many candidates and references");
  struct Pair {
    double d;
    size_t r, c;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n * n);
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) pairs.push_back({std::abs(reference[r] - candidates[c]), r, c});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
  std::vector<cplx> out(n);
  std::vector<char> used_r(n, 0), used_c(n, 0);
  size_t assigned = 0;
  for (const auto& p : pairs) {
    if (used_r[p.r] || used_c[p.c]) continue;
    used_r[p.r] = used_c[p.c] = 1;
    out[p.r] = candidates[p.c];
    if (++assigned == n) break;
  }
  return out;
}

std::vector<cplx> solve_fiber(const BivariatePolynomial& P, cplx z) {
  const Poly f = P.fiber(z);
  if (f.degree() < P.degree_y() || std::abs(f.leading()) <= tol::degenerate) {
    std::ostringstream msg;
    msg << "leading coefficient vanishes at z = " << z;
    fail(Errc::leading_coefficient_vanishes, msg.str());
  }
  std::vector<cplx> roots = polynomial_roots(f);
  sort_lexicographic(roots);
  return roots;
}

std::vector<cplx> solve_fiber_near(const BivariatePolynomial& P, cplx z, std::span<const cplx> reference,
                                   double* max_move) {
  const Poly f = P.fiber(z);
  if (f.degree() < P.degree_y() || std::abs(f.leading()) <= tol::degenerate) {
    std::ostringstream msg;
    msg << "leading coefficient vanishes at z = " << z;
    fail(Errc::leading_coefficient_vanishes, msg.str());
  }
  const std::vector<cplx> roots = polynomial_roots(f, reference);
  std::vector<cplx> out = match_nearest(reference, roots);
  if (max_move) {
    double m = 0.0;
    for (size_t i = 0; i < out.size(); ++i) m = std::max(m, std::abs(out[i] - reference[i]));
    *max_move = m;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Newton on (P, dP/dy) = 0 from (z, y); returns false if it does not improve.
bool refine_branch_point(const BivariatePolynomial& P, cplx& z, cplx y, double max_shift) {
  const int k = P.degree_y();
  auto eval = [&](cplx zz, cplx yy, cplx& f, cplx& fy, cplx& fz, cplx& fyy, cplx& fyz) {
    f = fy = fz = fyy = fyz = 0.0;
    cplx ypow = 1.0;
    std::vector<cplx> powers(k + 1);
    for (int j = 0; j <= k; ++j) {
      powers[j] = ypow;
      ypow *= yy;
    }
    for (int j = 0; j <= k; ++j) {
      cplx v, s;
      P.coeff(j).eval_with_derivative(zz, v, s);
      f += v * powers[j];
      fz += s * powers[j];
      if (j >= 1) {
        fy += static_cast<double>(j) * v * powers[j - 1];
        fyz += static_cast<double>(j) * s * powers[j - 1];
      }
      if (j >= 2) fyy += static_cast<double>(j * (j - 1)) * v * powers[j - 2];
    }
  };
  const cplx z0 = z;
  cplx f, fy, fz, fyy, fyz;
  eval(z, y, f, fy, fz, fyy, fyz);
  const double start = std::abs(f) + std::abs(fy);
  cplx zz = z, yy = y;
  for (int it = 0; it < 12; ++it) {
    eval(zz, yy, f, fy, fz, fyy, fyz);
    // J = [[fz, fy], [fyz, fyy]]
    const cplx det = fz * fyy - fy * fyz;
    if (std::abs(det) == 0.0) break;
    const cplx dz = (f * fyy - fy * fy) / det;
    const cplx dy = (fz * fy - fyz * f) / det;
    zz -= dz;
    yy -= dy;
    if (!std::isfinite(std::abs(zz)) || std::abs(zz - z0) > max_shift) return false;
    if (std::abs(dz) <= 4e-16 * (1.0 + std::abs(zz))) break;
  }
  eval(zz, yy, f, fy, fz, fyy, fyz);
  if (!(std::abs(f) + std::abs(fy) <= start)) return false;
  z = zz;
  return true;
}

}  // namespace

SingularSet discriminant_nodes(const BivariatePolynomial& P) {
  const Poly res = P.resultant_polynomial();
  if (res.is_zero()) fail(Errc::degenerate_discriminant, "resultant of P and dP/dy is identically zero");

  struct Candidate {
    cplx z;
    SingularKind kind;
  };
  std::vector<Candidate> leading, disc;
  if (P.coeff(P.degree_y()).degree() >= 1)
    for (cplx z : polynomial_roots(P.coeff(P.degree_y()))) leading.push_back({z, SingularKind::leading_coeff_zero});
  if (res.degree() >= 1)
    for (cplx z : polynomial_roots(res)) disc.push_back({z, SingularKind::discriminant_zero});

  // Multiple roots of the resultant come back as small clusters; group them
  // loosely and use the centroid.
  auto loose = [](cplx z) { return 1e-5 * (1.0 + std::abs(z)); };
  std::vector<cplx> lead_pts;
  for (const auto& c : leading) lead_pts.push_back(c.z);
  std::vector<char> taken(disc.size(), 0);
  std::vector<SingularPoint> found;
  for (cplx z : lead_pts) {
    bool dup = false;
    for (const auto& f : found) dup = dup || std::abs(f.z - z) <= loose(z);
    if (!dup) found.push_back({z, SingularKind::leading_coeff_zero});
  }
  for (size_t i = 0; i < disc.size(); ++i) {
    if (taken[i]) continue;
    cplx sum = 0.0;
    int count = 0;
    for (size_t j = i; j < disc.size(); ++j) {
      if (taken[j] || std::abs(disc[j].z - disc[i].z) > loose(disc[i].z)) continue;
      taken[j] = 1;
      sum += disc[j].z;
      ++count;
    }
    cplx z = sum / static_cast<double>(count);
    bool on_leading = false;
    for (cplx l : lead_pts) on_leading = on_leading || std::abs(l - z) <= loose(z);
    if (on_leading) continue;

    std::vector<cplx> ys = solve_fiber(P, z);
    size_t bi = 0, bj = 1;
    double best = kInf;
    for (size_t a = 0; a < ys.size(); ++a)
      for (size_t b = a + 1; b < ys.size(); ++b)
        if (std::abs(ys[a] - ys[b]) < best) {
          best = std::abs(ys[a] - ys[b]);
          bi = a;
          bj = b;
        }
    if (ys.size() >= 2) refine_branch_point(P, z, 0.5 * (ys[bi] + ys[bj]), loose(z));
    found.push_back({z, SingularKind::discriminant_zero});
  }

  std::sort(found.begin(), found.end(), [](const SingularPoint& a, const SingularPoint& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  double biggest = 0.0;
  for (const auto& f : found) biggest = std::max(biggest, std::abs(f.z));
  const double cluster_tol = tol::cluster_rel * (1.0 + biggest);
  SingularSet S;
  for (const auto& f : found) {
    auto it = std::find_if(S.points.begin(), S.points.end(),
                           [&](const SingularPoint& p) { return std::abs(p.z - f.z) <= cluster_tol; });
    if (it == S.points.end()) {
      S.points.push_back(f);
    } else if (f.kind == SingularKind::leading_coeff_zero) {
      it->kind = f.kind;
    }
  }
  if (S.points.size() >= 2) {
    double g = kInf;
    for (size_t i = 0; i < S.points.size(); ++i)
      for (size_t j = i + 1; j < S.points.size(); ++j) g = std::min(g, std::abs(S.points[i].z - S.points[j].z));
    S.safety_radius = g / 4.0;
  } else {
    S.safety_radius = 0.25 * (1.0 + biggest);
  }
  return S;
}

// ---------------------------------------------------------------------------

BranchTrack continue_branches(const BivariatePolynomial& P, std::span<const cplx> path,
                              std::span<const cplx> start_labels, ContinuationOptions opts) {
  return continue_branches(P, discriminant_nodes(P), path, start_labels, opts);
}

BranchTrack continue_branches(const BivariatePolynomial& P, const SingularSet& S, std::span<const cplx> path,
                              std::span<const cplx> start_labels, ContinuationOptions opts) {
  if (path.empty()) fail(Errc::invalid_input, "path has no vertices");
  const double clearance = opts.clearance >= 0.0 ? opts.clearance : 0.5 * S.safety_radius;
  for (size_t i = 0; i < path.size(); ++i) {
    const double d = (i + 1 < path.size()) ? S.segment_distance(path[i], path[i + 1]) : S.distance(path[i]);
    if (d <= clearance) {
      std::ostringstream msg;
      msg << "path passes within " << d << " of the singular set near vertex " << i << " (" << path[i] << ")";
      fail(Errc::path_hits_singular_set, msg.str());
    }
  }
  const int k = P.degree_y();

  std::vector<cplx> roots;
  const std::vector<cplx> first = solve_fiber(P, path[0]);
  if (!start_labels.empty()) {
    if (static_cast<int>(start_labels.size()) != k) fail(Errc::invalid_input, "start labels must have k entries");
    roots.assign(start_labels.begin(), start_labels.end());
    for (cplx y : roots)
      if (P.residual(path[0], y) > 1e3 * tol::residual)
        fail(Errc::invalid_input, "start labels do not solve the first fiber");
  } else {
    roots = first;
  }

  double total = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) total += std::abs(path[i + 1] - path[i]);

  BranchTrack track;
  track.samples.push_back({0.0, path[0], roots});
  track.vertex_sample.push_back(0);
  double travelled = 0.0;
  double hs = kInf;
  for (size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const cplx a = path[seg], b = path[seg + 1];
    const double L = std::abs(b - a);
    double done = 0.0;  // arclength covered on this segment
    cplx z = a;
    if (!std::isfinite(hs)) hs = L;
    while (L - done > 0.0) {
      const double cap = S.points.empty() ? kInf : 0.5 * S.distance(z);
      const double remaining = L - done;
      double step = std::min({hs, cap, remaining});
      if (step < opts.min_step && remaining > opts.min_step) {
        std::ostringstream msg;
        msg << "continuation step fell below " << opts.min_step << " near z = " << z;
        fail(Errc::step_underflow, msg.str());
      }
      const bool last = step >= remaining;
      const cplx z1 = last ? b : a + (done + step) / L * (b - a);

      bool ok = true;
      std::vector<cplx> next;
      try {
        const Poly f = P.fiber(z1);
        if (f.degree() < k || std::abs(f.leading()) <= tol::degenerate) fail(Errc::leading_coefficient_vanishes, "");
        next = polynomial_roots(f, roots);
        const std::vector<cplx> matched = match_nearest(roots, next);
        const double half_gap = 0.5 * min_gap(roots);
        for (int nu = 0; nu < k && ok; ++nu) {
          if (matched[nu] != next[nu]) ok = false;  // warm start and nearest matching disagree
          if (std::abs(next[nu] - roots[nu]) >= half_gap) ok = false;
          if (P.residual(z1, next[nu]) >= tol::residual) ok = false;
        }
      } catch (const Error& e) {
        if (e.code() != Errc::no_convergence) throw;
        ok = false;
      }
      if (!ok) {
        hs = 0.5 * step;
        if (hs < opts.min_step) {
          std::ostringstream msg;
          msg << "continuation step fell below " << opts.min_step << " near z = " << z;
          fail(Errc::step_underflow, msg.str());
        }
        continue;
      }
      roots = std::move(next);
      done = last ? L : done + step;
      z = z1;
      hs = 1.5 * step;
      const double t = total > 0.0 ? std::min(1.0, (travelled + done) / total) : 0.0;
      track.samples.push_back({t, z, roots});
    }
    travelled += L;
    track.vertex_sample.push_back(track.samples.size() - 1);
  }
  track.samples.back().t = path.size() > 1 ? 1.0 : 0.0;

  const cplx z_end = path.back();
  track.closed = path.size() > 1 && std::abs(z_end - path.front()) <= 1e-12 * (1.0 + std::abs(z_end));
  track.end_permutation.assign(k, 0);
  if (track.closed) {
    // label of the starting root each branch lands on
    const std::vector<cplx>& start = track.samples.front().roots;
    const std::vector<cplx> matched = match_nearest(roots, start);
    for (int nu = 0; nu < k; ++nu)
      for (int mu = 0; mu < k; ++mu)
        if (matched[nu] == start[mu]) track.end_permutation[nu] = mu;
  } else {
    std::vector<cplx> sorted = roots;
    sort_lexicographic(sorted);
    for (int nu = 0; nu < k; ++nu)
      track.end_permutation[nu] =
          static_cast<int>(std::find(sorted.begin(), sorted.end(), roots[nu]) - sorted.begin());
  }
  return track;
}

Permutation monodromy(const BivariatePolynomial& P, cplx base, std::span<const cplx> loop) {
  if (loop.size() < 3) fail(Errc::invalid_input, "a loop needs at least three vertices");
  const double tol_base = 1e-12 * (1.0 + std::abs(base));
  if (std::abs(loop.front() - base) > tol_base) fail(Errc::invalid_input, "loop must start at the base point");
  std::vector<cplx> closed(loop.begin(), loop.end());
  if (std::abs(closed.back() - base) > tol_base) closed.push_back(base);
  closed.front() = base;
  closed.back() = base;
  return continue_branches(P, closed).end_permutation;
}

std::vector<cplx> circle_path(cplx center, double radius, int n, double phase) {
  if (n < 3) fail(Errc::invalid_input, "circle needs at least three vertices");
  std::vector<cplx> v(static_cast<size_t>(n) + 1);
  for (int i = 0; i < n; ++i) v[i] = center + std::polar(radius, phase + kTwoPi * i / n);
  v[n] = v[0];
  return v;
}

}  // namespace potlab
