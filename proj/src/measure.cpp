#include "potlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "potlab/quadrature.hpp"

namespace potlab {

double Arc::length() const {
  double L = 0.0;
  for (size_t m = 0; m + 1 < points.size(); ++m) L += std::abs(points[m + 1] - points[m]);
  return L;
}

cplx Arc::at(double s) const {
  for (size_t m = 0; m + 1 < points.size(); ++m) {
    const double l = std::abs(points[m + 1] - points[m]);
    if (s <= l || m + 2 == points.size()) return points[m] + (l > 0.0 ? std::min(s, l) / l : 0.0) * (points[m + 1] - points[m]);
    s -= l;
  }
  return points.front();
}

std::vector<std::pair<cplx, double>> Arc::discretize() const {
  std::vector<std::pair<cplx, double>> out;
  if (rule == ArcRuleKind::trapezoid) {
    for (size_t m = 0; m + 1 < points.size(); ++m) {
      const double l = std::abs(points[m + 1] - points[m]);
      out.push_back({points[m], 0.5 * l * density[m]});
      out.push_back({points[m + 1], 0.5 * l * density[m + 1]});
    }
    return out;
  }
  const ArcRule r = endpoint_singular_rule(length(), static_cast<int>(density.size()), alpha, beta);
  for (size_t i = 0; i < r.s.size(); ++i) out.push_back({at(r.s[i]), r.weights[i] * density[i]});
  return out;
}

Arc gauss_jacobi_arc(std::vector<cplx> points, int n, double alpha, double beta,
                     const std::function<double(cplx)>& density) {
  if (points.size() < 2) fail(Errc::invalid_input, "an arc needs at least two points");
  Arc a{std::move(points), {}, ArcRuleKind::gauss_jacobi, alpha, beta};
  const ArcRule r = endpoint_singular_rule(a.length(), n, alpha, beta);
  for (double s : r.s) a.density.push_back(density(a.at(s)));
  return a;
}

double Measure::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.w;
  for (const Arc& arc : arcs)
    for (const auto& [z, w] : arc.discretize()) m += w;
  return m;
}

double Measure::diameter() const {
  std::vector<cplx> pts;
  for (const Atom& a : atoms) pts.push_back(a.z);
  for (const Arc& arc : arcs) pts.insert(pts.end(), arc.points.begin(), arc.points.end());
  double d = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, std::abs(pts[i] - pts[j]));
  return d;
}

double Measure::distance_to_support(cplx z) const {
  double d = INFINITY;
  for (const Atom& a : atoms) d = std::min(d, std::abs(z - a.z));
  for (const Arc& arc : arcs) {
    for (size_t m = 0; m + 1 < arc.points.size(); ++m) {
      const cplx p = arc.points[m], q = arc.points[m + 1];
      const double L2 = std::norm(q - p);
      const double t = L2 > 0.0 ? std::clamp(((z - p) * std::conj(q - p)).real() / L2, 0.0, 1.0) : 0.0;
      d = std::min(d, std::abs(z - (p + t * (q - p))));
    }
    if (arc.points.size() == 1) d = std::min(d, std::abs(z - arc.points[0]));
  }
  return d;
}

void Measure::validate() const {
  for (const Atom& a : atoms)
    if (!(a.w >= 0.0)) fail(Errc::invalid_input, "atom weights must be nonnegative");
  for (const Arc& arc : arcs) {
    if (arc.points.size() < 2) fail(Errc::invalid_input, "an arc needs at least two points");
    if (arc.rule == ArcRuleKind::trapezoid && arc.density.size() != arc.points.size())
      fail(Errc::invalid_input, "trapezoid arcs need one density value per point");
    if (arc.rule == ArcRuleKind::gauss_jacobi && (arc.density.empty() || arc.alpha <= -1.0 || arc.beta <= -1.0))
      fail(Errc::invalid_input, "Gauss-Jacobi arcs need node samples and exponents above -1");
    for (double d : arc.density)
      if (!(d >= 0.0)) fail(Errc::invalid_input, "densities must be nonnegative");
  }
}

namespace {

void check_clearance(const Measure& mu, cplx z) {
  const double d = mu.distance_to_support(z);
  if (d <= tol::eval_clearance_rel * mu.diameter()) {
    std::ostringstream msg;
    msg << "z = " << z << " is " << d << " from the support";
    fail(Errc::too_close_to_support, msg.str());
  }
}

}  // namespace

cplx cauchy_transform(const Measure& mu, cplx z) {
  check_clearance(mu, z);
  cplx sum = 0.0;
  for (const Atom& a : mu.atoms) sum += a.w / (z - a.z);
  for (const Arc& arc : mu.arcs)
    for (const auto& [zeta, w] : arc.discretize()) sum += w / (z - zeta);
  return sum;
}

double log_potential(const Measure& mu, cplx z) {
  check_clearance(mu, z);
  double sum = 0.0;
  for (const Atom& a : mu.atoms) sum += a.w * std::log(std::abs(z - a.z));
  for (const Arc& arc : mu.arcs)
    for (const auto& [zeta, w] : arc.discretize()) sum += w * std::log(std::abs(z - zeta));
  return sum;
}

double verify_algebraic_relation(const BivariatePolynomial& P, const Measure& mu, std::span<const cplx> samples) {
  double worst = 0.0;
  for (cplx z : samples) worst = std::max(worst, P.residual(z, cauchy_transform(mu, z)));
  return worst;
}

ConfigurationField potential_field(const Measure& mu, const Grid& grid, Execution exec) {
  ConfigurationField F{grid, 1, std::vector<double>(grid.size()), std::vector<int>(grid.size(), 0), {0}, {}, {{0}},
                       std::vector<int>(grid.size(), 0)};
  for_each_index(static_cast<long>(grid.size()), exec,
                 [&](long i) { F.values[i] = log_potential(mu, grid.node(static_cast<size_t>(i))); });
  F.components = {F.values};
  return F;
}

namespace {

// Portion [t0, t1] of the segment p + t d, t in [0, 1], inside the disk.
bool clip(cplx p, cplx d, cplx c, double r, double& t0, double& t1) {
  const double A = std::norm(d), B = 2.0 * ((p - c) * std::conj(d)).real(), C = std::norm(p - c) - r * r;
  if (A == 0.0) {
    t0 = 0.0, t1 = 1.0;
    return C <= 0.0;
  }
  const double disc = B * B - 4 * A * C;
  if (disc <= 0.0) return false;
  const double sq = std::sqrt(disc);
  t0 = std::max(0.0, (-B - sq) / (2 * A));
  t1 = std::min(1.0, (-B + sq) / (2 * A));
  return t1 > t0;
}

}  // namespace

double InterfaceDensity::mass(std::optional<std::pair<cplx, double>> disk) const {
  double sum = 0.0;
  for (size_t m = 0; m + 1 < points.size(); ++m) {
    const cplx p = points[m], d = points[m + 1] - points[m];
    double t0 = 0.0, t1 = 1.0;
    if (disk && !clip(p, d, disk->first, disk->second, t0, t1)) continue;
    const double l0 = lambda[m] + t0 * (lambda[m + 1] - lambda[m]);
    const double l1 = lambda[m] + t1 * (lambda[m + 1] - lambda[m]);
    sum += 0.5 * (l0 + l1) * (t1 - t0) * std::abs(d);
  }
  return sum / kTwoPi;
}

double RieszDensity::mass(std::optional<std::pair<cplx, double>> disk) const {
  double m = 0.0;
  for (const auto& f : interfaces) m += f.mass(disk);
  return m;
}

double RieszDensity::min_lambda() const {
  double m = INFINITY;
  for (const auto& f : interfaces)
    for (double l : f.lambda) m = std::min(m, l);
  return m;
}

namespace {

// Active index at the node nearest to z, or -1 off the grid.
int active_near(const ConfigurationField& F, cplx z) {
  const Grid& g = F.grid;
  const long ix = std::lround((z.real() - g.x0) / g.h), iy = std::lround((z.imag() - g.y0) / g.h);
  if (ix < 0 || ix >= g.nx || iy < 0 || iy >= g.ny) return -1;
  return F.active[g.index(static_cast<int>(ix), static_cast<int>(iy))];
}

// Active index at z resolved below the grid scale: the interpolated
// components of the local piece compete; without pieces, the labels of the
// surrounding 4 x 4 nodes do. Falls back to the nearest node without components.
int active_at(const ConfigurationField& F, cplx z) {
  const Grid& g = F.grid;
  if (F.components.empty()) return active_near(F, z);
  if (z.real() < g.x0 || z.real() > g.x_max() || z.imag() < g.y0 || z.imag() > g.y_max()) return -1;
  if (!F.pieces.empty()) {
    const long ix = std::lround((z.real() - g.x0) / g.h), iy = std::lround((z.imag() - g.y0) / g.h);
    const std::vector<int>& set = F.pieces[F.piece[g.index(static_cast<int>(ix), static_cast<int>(iy))]];
    int best = set.front();
    double best_v = F.envelope * bicubic(g, F.components[best], z);
    for (int nu : set) {
      const double v = F.envelope * bicubic(g, F.components[nu], z);
      if (v > best_v) best = nu, best_v = v;
    }
    return best;
  }
  const int cx = static_cast<int>(std::floor((z.real() - g.x0) / g.h));
  const int cy = static_cast<int>(std::floor((z.imag() - g.y0) / g.h));
  int best = -1;
  double best_v = 0.0;
  for (int iy = std::max(0, cy - 1); iy <= std::min(g.ny - 1, cy + 2); ++iy)
    for (int ix = std::max(0, cx - 1); ix <= std::min(g.nx - 1, cx + 2); ++ix) {
      const int nu = F.active[g.index(ix, iy)];
      if (nu == best) continue;
      const double v = F.envelope * bicubic(g, F.components[nu], z);
      if (best < 0 || v > best_v || (v == best_v && nu < best)) best = nu, best_v = v;
    }
  return best;
}

}  // namespace

RieszDensity jump_density(const ConfigurationField& F, const HarmonicTuple& H, std::span<const LevelCurve> curves) {
  RieszDensity out;
  const double eps = (F.components.empty() ? 2.0 : 1e-3) * F.grid.h;
  for (const LevelCurve& c : curves) {
    if (c.i == c.j || c.i < 0 || c.j < 0 || c.i >= H.size() || c.j >= H.size())
      fail(Errc::invalid_input, "curve indices out of range");
    InterfaceDensity d;
    d.i = c.i, d.j = c.j;
    std::vector<double> grad(c.points.size());
    int valid = 0, other = 0, i_plus = 0;
    for (size_t m = 0; m < c.points.size(); ++m) {
      const cplx G = c.branches[m][c.i] - c.branches[m][c.j];
      grad[m] = 2.0 * std::abs(G);
      if (G == cplx{}) continue;
      const cplx N = std::conj(G) / std::abs(G);  // direction in which H_i - H_j grows
      const int plus = active_at(F, c.points[m] + eps * N), minus = active_at(F, c.points[m] - eps * N);
      if (plus < 0 || minus < 0) continue;
      if ((plus == c.i && minus == c.j) || (plus == c.j && minus == c.i)) {
        ++valid;
        i_plus += plus == c.i;
      } else {
        ++other;
      }
    }
    const int seen = valid + other;
    if (seen == 0 || valid <= 0.2 * seen) {
      out.interfaces.push_back(std::move(d));
      continue;
    }
    const int i_minus = valid - i_plus;
    if (valid < 0.8 * seen || std::min(i_plus, i_minus) > 0.2 * valid) {
      std::ostringstream msg;
      msg << "curve H" << c.i + 1 << " = H" << c.j + 1 << ": " << valid << " of " << seen
          << " samples separate the pair, " << i_plus << " with H" << c.i + 1 << " on the rising side";
      fail(Errc::ambiguous_interface, msg.str());
    }
    const bool i_rising = i_plus >= i_minus;
    d.a = i_rising ? c.i : c.j;
    d.b = i_rising ? c.j : c.i;
    d.points = c.points;
    d.s = c.s;
    for (double g : grad) d.lambda.push_back(i_rising ? g : -g);
    out.interfaces.push_back(std::move(d));
  }
  return out;
}

double stokes_mass(const ConfigurationField& F, cplx center, double radius) {
  const Grid& g = F.grid;
  const double eps = g.h;
  const double margin = radius + 2.0 * g.h;
  if (!(radius > 0.0) || center.real() - margin < g.x0 || center.real() + margin > g.x_max() ||
      center.imag() - margin < g.y0 || center.imag() + margin > g.y_max()) {
    std::ostringstream msg;
    msg << "circle |z - " << center << "| = " << radius << " does not fit in the grid with margin 2h";
    fail(Errc::circle_exits_grid, msg.str());
  }
  const bool comps = !F.components.empty();
  auto point = [&](double th) { return center + std::polar(radius, th); };
  auto component = [&](int nu, cplx z) {
    return comps ? bicubic(g, F.components[nu], z) : bicubic(g, F.values, z);
  };

  const int probes = 4096;
  std::vector<int> label(probes);
  for (int p = 0; p < probes; ++p) label[p] = std::max(0, active_at(F, point(kTwoPi * p / probes)));

  // crossings[m] starts a run carrying label runs[m]
  std::vector<double> starts;
  std::vector<int> runs;
  for (int p = 0; p < probes; ++p) {
    const int a = label[(p + probes - 1) % probes], b = label[p];
    if (a == b) continue;
    double lo = kTwoPi * (p - 1) / probes, hi = kTwoPi * p / probes, th = 0.5 * (lo + hi);
    if (comps) {
      auto diff = [&](double t) { return component(a, point(t)) - component(b, point(t)); };
      double flo = diff(lo), fhi = diff(hi);
      for (int widen = 0; widen < 16 && flo * fhi > 0.0; ++widen) {
        lo -= kTwoPi / probes, hi += kTwoPi / probes;
        flo = diff(lo), fhi = diff(hi);
      }
      if (flo * fhi <= 0.0) {
        for (int it = 0; it < 60; ++it) {
          th = 0.5 * (lo + hi);
          const double f = diff(th);
          if ((f <= 0.0) == (flo <= 0.0)) lo = th, flo = f;
          else hi = th;
        }
        th = 0.5 * (lo + hi);
      }
    }
    starts.push_back(th);
    runs.push_back(b);
  }
  if (starts.empty()) {
    starts.push_back(0.0);
    runs.push_back(label[0]);
  }

  double flux = 0.0;
  const size_t n = starts.size();
  for (size_t m = 0; m < n; ++m) {
    const double t0 = starts[m];
    double t1 = m + 1 < n ? starts[m + 1] : starts[0] + kTwoPi;
    if (n == 1) t1 = t0 + kTwoPi;
    const int nu = runs[m];
    const int order = std::max(8, static_cast<int>(std::ceil(tol::stokes_samples * (t1 - t0) / kTwoPi)));
    const QuadratureRule& q = gauss_legendre(order);
    const double half = 0.5 * (t1 - t0), mid = 0.5 * (t1 + t0);
    for (int i = 0; i < order; ++i) {
      const double th = mid + half * q.nodes[i];
      const cplx u = std::polar(1.0, th);
      const double dn = (component(nu, center + (radius + eps) * u) - component(nu, center + (radius - eps) * u)) /
                        (2.0 * eps);
      flux += q.weights[i] * half * radius * dn;
    }
  }
  return flux / kTwoPi;
}

}  // namespace potlab
