#include "potlab/configurations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace potlab {

RegionMask region_of(const ConfigurationField& F, int nu) {
  RegionMask m{F.grid, std::vector<char>(F.grid.size(), 0)};
  for (size_t i = 0; i < m.inside.size(); ++i) m.inside[i] = F.active[i] == nu;
  return m;
}

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double L2 = std::norm(ab);
  if (L2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(ab)).real() / L2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

// Andrew's monotone chain; collinear points are dropped from the hull.
std::vector<cplx> convex_hull(std::vector<cplx> pts, double eps) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<cplx> hull(2 * pts.size());
  size_t n = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (n >= 2 && cross(hull[n - 1] - hull[n - 2], pts[i] - hull[n - 2]) <= eps) --n;
    hull[n++] = pts[i];
  }
  for (size_t i = pts.size() - 1, lo = n + 1; i-- > 0;) {
    while (n >= lo && cross(hull[n - 1] - hull[n - 2], pts[i] - hull[n - 2]) <= eps) --n;
    hull[n++] = pts[i];
  }
  hull.resize(n - 1);
  return hull;
}

}  // namespace

HullProfile extreme_point_profile(std::span<const cplx> gradients) {
  HullProfile out;
  const size_t k = gradients.size();
  if (k == 0) return out;
  double diam = 0.0;
  for (cplx a : gradients)
    for (cplx b : gradients) diam = std::max(diam, std::abs(a - b));
  if (diam <= 1e-300) {
    out.status.assign(k, HullStatus::on_edge);
    out.degenerate = true;
    out.warning = "all gradients coincide; the hull is a single point";
    return out;
  }
  const double tol = tol::hull_rel * diam;
  const std::vector<cplx> hull = convex_hull({gradients.begin(), gradients.end()}, tol * diam);
  if (hull.size() == 2) {
    out.degenerate = true;
    out.warning = "gradients are collinear; the hull is a segment";
  }
  out.status.resize(k);
  for (size_t i = 0; i < k; ++i) {
    const cplx g = gradients[i];
    bool vertex = false;
    for (cplx v : hull) vertex = vertex || std::abs(g - v) <= tol;
    if (vertex) {
      out.status[i] = HullStatus::extreme;
      continue;
    }
    bool edge = false;
    const size_t m = hull.size();
    for (size_t e = 0; e < m && !edge; ++e) edge = segment_distance(g, hull[e], hull[(e + 1) % m]) <= tol;
    out.status[i] = edge ? HullStatus::on_edge : HullStatus::interior;
  }
  return out;
}

const char* hull_status_name(HullStatus s) {
  switch (s) {
    case HullStatus::extreme: return "extreme";
    case HullStatus::interior: return "interior";
    case HullStatus::on_edge: return "on_edge";
  }
  return "?";
}

std::vector<std::vector<double>> evaluate_components(const HarmonicTuple& H, const Grid& grid, Execution exec) {
  const int k = H.size();
  const long n = static_cast<long>(grid.size());
  std::vector<std::vector<double>> comps(k, std::vector<double>(n));
  auto node = [&](long idx) {
    const Frame f = H.frame_at(grid.node(static_cast<size_t>(idx)));
    for (int nu = 0; nu < k; ++nu) comps[nu][idx] = H.value(nu, f);
  };
  for_each_index(n, exec, node);
  return comps;
}

namespace {

void check_index_set(const std::vector<int>& set, int k) {
  if (set.empty()) fail(Errc::invalid_input, "empty index set");
  for (int nu : set)
    if (nu < 0 || nu >= k) fail(Errc::invalid_input, "index set entry out of range");
}

// Envelope over index_set; `sign` = +1 for the max, -1 for the min.
ConfigurationField envelope(const HarmonicTuple& H, std::vector<int> index_set, const Grid& grid, Execution exec,
                            double sign) {
  check_index_set(index_set, H.size());
  std::sort(index_set.begin(), index_set.end());
  index_set.erase(std::unique(index_set.begin(), index_set.end()), index_set.end());
  ConfigurationField F{grid, H.size(), std::vector<double>(grid.size()), std::vector<int>(grid.size()), index_set,
                       evaluate_components(H, grid, exec), {}, {}};
  for (size_t idx = 0; idx < grid.size(); ++idx) {
    int best = index_set.front();
    for (int nu : index_set)
      if (sign * F.components[nu][idx] > sign * F.components[best][idx]) best = nu;
    F.active[idx] = best;
    F.values[idx] = F.components[best][idx];
  }
  F.envelope = sign > 0 ? 1 : -1;
  F.pieces = {F.index_set};
  F.piece.assign(grid.size(), 0);
  return F;
}

}  // namespace

ConfigurationField max_configuration(const HarmonicTuple& H, std::vector<int> index_set, const Grid& grid,
                                     Execution exec) {
  return envelope(H, std::move(index_set), grid, exec, 1.0);
}

ConfigurationField min_configuration(const HarmonicTuple& H, std::vector<int> index_set, const Grid& grid,
                                     Execution exec) {
  return envelope(H, std::move(index_set), grid, exec, -1.0);
}

std::vector<CollinearConfiguration> enumerate_collinear_configurations(int k) {
  if (k < 2) fail(Errc::invalid_input, "need k >= 2");
  if (k > 16) fail(Errc::invalid_input, "k too large to enumerate");
  const int inner = k - 2;
  auto sequence = [&](unsigned mask) {
    std::vector<int> s{1};
    for (int b = 0; b < inner; ++b)
      if (mask & (1u << b)) s.push_back(b + 2);
    s.push_back(k);
    return s;
  };
  std::vector<std::vector<int>> halves;
  for (unsigned mask = 0; mask < (1u << inner); ++mask) halves.push_back(sequence(mask));
  std::sort(halves.begin(), halves.end());
  std::vector<CollinearConfiguration> out;
  out.reserve(halves.size() * halves.size());
  for (const auto& u : halves)
    for (const auto& l : halves) out.push_back({u, l});
  return out;
}

bool middle_active(const CollinearConfiguration& c) {
  auto inner = [](const std::vector<int>& s) { return s.size() > 2; };
  return inner(c.upper) || inner(c.lower);
}

std::string to_string(const CollinearConfiguration& c) {
  std::ostringstream out;
  for (size_t i = 0; i < c.upper.size(); ++i) out << (i ? "," : "") << c.upper[i];
  out << '|';
  for (size_t i = 0; i < c.lower.size(); ++i) out << (i ? "," : "") << c.lower[i];
  return out.str();
}

CollinearConfiguration parse_collinear(const std::string& text, int k) {
  const auto bar = text.find('|');
  if (bar == std::string::npos) fail(Errc::invalid_input, "configuration must look like 1,2,3|1,3");
  auto half = [&](const std::string& s) {
    std::vector<int> seq;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        size_t used = 0;
        seq.push_back(std::stoi(tok, &used));
        if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(Errc::invalid_input, "bad rank '" + tok + "'");
      }
    }
    if (seq.size() < 2 || seq.front() != 1 || seq.back() != k)
      fail(Errc::invalid_input, "each half must run from 1 to k");
    for (size_t i = 1; i < seq.size(); ++i)
      if (seq[i] <= seq[i - 1]) fail(Errc::invalid_input, "ranks must increase strictly");
    return seq;
  };
  return {half(text.substr(0, bar)), half(text.substr(bar + 1))};
}

CollinearSetup collinear_setup(const HarmonicTuple& H, cplx center) {
  const int k = H.size();
  if (k < 2) fail(Errc::invalid_input, "need at least two branches");
  std::vector<cplx> grad(k);
  for (int nu = 0; nu < k; ++nu) {
    const auto g = harmonic_gradient(H, nu, center);
    grad[nu] = {g[0], g[1]};
  }
  // Only differences of gradients matter: adding one harmonic function to
  // every H_nu shifts all of them and leaves the configurations unchanged.
  int a = 0, b = 1;
  double scale = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (std::abs(grad[i] - grad[j]) > scale) scale = std::abs(grad[i] - grad[j]), a = i, b = j;
  if (scale == 0.0) fail(Errc::invalid_input, "all gradients coincide");
  cplx d = (grad[b] - grad[a]) / scale;
  if (d.real() < -1e-15 || (std::abs(d.real()) <= 1e-15 && d.imag() < 0.0)) d = -d;
  CollinearSetup out;
  out.direction = {d.real(), d.imag()};
  out.projection.resize(k);
  for (int nu = 0; nu < k; ++nu) {
    const cplx rel = grad[nu] - grad[a];
    if (std::abs(cross(rel, d)) > tol::collinear * scale) {
      std::ostringstream msg;
      msg << "gradient of branch " << nu + 1 << " is off the common line by " << std::abs(cross(rel, d));
      fail(Errc::not_collinear, msg.str());
    }
    out.projection[nu] = (rel * std::conj(d)).real();
  }
  out.by_rank.resize(k);
  std::iota(out.by_rank.begin(), out.by_rank.end(), 0);
  std::stable_sort(out.by_rank.begin(), out.by_rank.end(),
                   [&](int x, int y) { return out.projection[x] < out.projection[y]; });
  for (int r = 1; r < k; ++r)
    if (out.projection[out.by_rank[r]] - out.projection[out.by_rank[r - 1]] <= tol::collinear * scale)
      fail(Errc::invalid_input, "two gradients coincide; equal projections are not supported");
  return out;
}

ConfigurationField assemble_configuration(const HarmonicTuple& H, const CollinearConfiguration& cfg,
                                          const Grid& grid, cplx center, Execution exec) {
  const int k = H.size();
  for (const auto* half : {&cfg.upper, &cfg.lower}) {
    if (half->size() < 2 || half->front() != 1 || half->back() != k)
      fail(Errc::invalid_input, "each half must run from rank 1 to rank k");
    for (size_t i = 1; i < half->size(); ++i)
      if ((*half)[i] <= (*half)[i - 1]) fail(Errc::invalid_input, "ranks must increase strictly");
  }
  const CollinearSetup setup = collinear_setup(H, center);
  auto to_index = [&](const std::vector<int>& ranks) {
    std::vector<int> idx;
    for (int r : ranks) idx.push_back(setup.by_rank[r - 1]);
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  const std::vector<int> up = to_index(cfg.upper), lo = to_index(cfg.lower);
  std::vector<int> all = up;
  all.insert(all.end(), lo.begin(), lo.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  ConfigurationField F{grid, k, std::vector<double>(grid.size()), std::vector<int>(grid.size()), all,
                       evaluate_components(H, grid, exec), {}, {}};
  for (int nu = 0; nu < k; ++nu) {
    const double v0 = harmonic_value(H, nu, center);
    for (double& v : F.components[nu]) v -= v0;
  }
  const cplx normal = cplx{0.0, 1.0} * cplx{setup.direction[0], setup.direction[1]};
  F.pieces = {up, lo};
  F.piece.resize(grid.size());
  for (size_t idx = 0; idx < grid.size(); ++idx) {
    const bool upper = ((grid.node(idx) - center) * std::conj(normal)).real() >= 0.0;
    F.piece[idx] = upper ? 0 : 1;
    const std::vector<int>& set = upper ? up : lo;
    int best = set.front();
    for (int nu : set)
      if (F.components[nu][idx] > F.components[best][idx]) best = nu;
    F.active[idx] = best;
    F.values[idx] = F.components[best][idx];
  }
  return F;
}

namespace {

// Largest |second difference| / h^2 over 3-node stencils whose nodes share
// one active index (so the stencil sees a single harmonic piece).
double curvature_bound(const ConfigurationField& F) {
  const Grid& g = F.grid;
  double M = 0.0;
  auto same = [&](size_t a, size_t b, size_t c) { return F.active[a] == F.active[b] && F.active[b] == F.active[c]; };
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const size_t c = g.index(ix, iy);
      if (ix > 0 && ix + 1 < g.nx) {
        const size_t l = g.index(ix - 1, iy), r = g.index(ix + 1, iy);
        if (same(l, c, r)) M = std::max(M, std::abs(F.values[l] - 2.0 * F.values[c] + F.values[r]));
      }
      if (iy > 0 && iy + 1 < g.ny) {
        const size_t d = g.index(ix, iy - 1), u = g.index(ix, iy + 1);
        if (same(d, c, u)) M = std::max(M, std::abs(F.values[d] - 2.0 * F.values[c] + F.values[u]));
      }
    }
  return M / (g.h * g.h);
}

void scan_row(const ConfigurationField& F, int iy, double mv_tol, std::vector<Violation>& out) {
  const Grid& g = F.grid;
  const int n = tol::mean_value_samples;
  for (int ix = 0; ix < g.nx; ++ix) {
    const double v = F.values[g.index(ix, iy)];
    const cplx p = g.node(ix, iy);
    double worst = 0.0;
    for (int m : {1, 2, 4}) {
      if (ix - m < 0 || ix + m >= g.nx || iy - m < 0 || iy + m >= g.ny) break;
      const double r = m * g.h;
      double avg = 0.0;
      for (int j = 0; j < n; ++j) avg += bilinear(g, F.values, p + std::polar(r, kTwoPi * j / n));
      avg /= n;
      worst = std::max(worst, v - avg);
    }
    if (worst > mv_tol) out.push_back({ix, iy, p, worst});
  }
}

}  // namespace

SubharmonicReport verify_subharmonic(const ConfigurationField& F, Execution exec) {
  const Grid& g = F.grid;
  if (g.nx < 3 || g.ny < 3) fail(Errc::invalid_input, "grid has no interior nodes");
  SubharmonicReport rep;
  rep.mv_tol = tol::mv_abs + tol::mv_curvature_factor * g.h * g.h * curvature_bound(F);
  std::vector<std::vector<Violation>> rows(g.ny);
  for_each_index(g.ny, exec, [&](long iy) { scan_row(F, static_cast<int>(iy), rep.mv_tol, rows[iy]); });
  for (auto& r : rows) rep.violations.insert(rep.violations.end(), r.begin(), r.end());
  return rep;
}

bool verify_forward_star(const RegionMask& mask, std::array<double, 2> direction) {
  const Grid& g = mask.grid;
  if (mask.inside.size() != g.size()) fail(Errc::invalid_input, "mask does not match its grid");
  const double len = std::hypot(direction[0], direction[1]);
  if (len == 0.0) fail(Errc::invalid_input, "zero direction");
  const double dx = direction[0] / len, dy = direction[1] / len;
  auto at = [&](int ix, int iy) {
    return ix >= 0 && ix < g.nx && iy >= 0 && iy < g.ny && mask.inside[g.index(ix, iy)];
  };
  auto near_true = [&](int ix, int iy) {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        if (at(ix + a, iy + b)) return true;
    return false;
  };
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      if (!mask.inside[g.index(ix, iy)]) continue;
      for (int m = 1;; ++m) {
        const int jx = static_cast<int>(std::lround(ix + m * dx));
        const int jy = static_cast<int>(std::lround(iy + m * dy));
        if (jx < 0 || jx >= g.nx || jy < 0 || jy >= g.ny) break;
        if (!at(jx, jy) && !near_true(jx, jy)) return false;
      }
    }
  return true;
}

double interface_lipschitz(const ConfigurationField& F, int nu) {
  const Grid& g = F.grid;
  std::vector<double> rho(g.ny, std::nan(""));
  int kind = 0;  // +1: region to the right of the interface, -1: to the left
  bool any = false;
  for (int iy = 0; iy < g.ny; ++iy) {
    std::vector<int> flips;
    for (int ix = 0; ix + 1 < g.nx; ++ix)
      if ((F.active[g.index(ix, iy)] == nu) != (F.active[g.index(ix + 1, iy)] == nu)) flips.push_back(ix);
    if (F.active[g.index(0, iy)] == nu || !flips.empty()) any = true;
    if (flips.empty()) continue;
    if (flips.size() > 1) {
      std::ostringstream msg;
      msg << "row " << iy << " crosses the boundary of region " << nu + 1 << ' ' << flips.size() << " times";
      fail(Errc::not_a_graph, msg.str());
    }
    const int ix = flips.front();
    const bool left_in = F.active[g.index(ix, iy)] == nu;
    const int row_kind = left_in ? -1 : 1;
    if (kind != 0 && row_kind != kind) fail(Errc::not_a_graph, "region switches sides of its boundary");
    kind = row_kind;
    double t = 0.5;
    if (!F.components.empty()) {
      const size_t a = g.index(ix, iy), b = g.index(ix + 1, iy);
      const int other = left_in ? F.active[b] : F.active[a];
      const double d0 = F.components[nu][a] - F.components[other][a];
      const double d1 = F.components[nu][b] - F.components[other][b];
      if (d0 != d1 && d0 * d1 <= 0.0) t = d0 / (d0 - d1);
    }
    rho[iy] = g.x0 + (ix + t) * g.h;
  }
  if (!any) fail(Errc::not_a_graph, "region is empty");
  int measured = 0;
  double L = 0.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    if (std::isnan(rho[iy])) continue;
    ++measured;
    if (iy > 0 && !std::isnan(rho[iy - 1])) L = std::max(L, std::abs(rho[iy] - rho[iy - 1]) / g.h);
  }
  if (measured < 2) fail(Errc::not_a_graph, "boundary crosses fewer than two rows");
  return L;
}

double separation_angle(const HarmonicTuple& H, int dominant, const Grid& grid) {
  const int k = H.size();
  if (dominant < 0 || dominant >= k) fail(Errc::invalid_input, "dominant index out of range");
  double delta = kPi / 2.0;
  for (size_t idx = 0; idx < grid.size(); ++idx) {
    const Frame f = H.frame_at(grid.node(idx));
    for (int nu = 0; nu < k; ++nu) {
      if (nu == dominant) continue;
      delta = std::min(delta, kPi / 2.0 - std::abs(std::arg(f.g[dominant] - f.g[nu])));
    }
  }
  return delta;
}

double max_adjacent_jump(const ConfigurationField& F) {
  const Grid& g = F.grid;
  double J = 0.0;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double v = F.values[g.index(ix, iy)];
      if (ix + 1 < g.nx) J = std::max(J, std::abs(v - F.values[g.index(ix + 1, iy)]));
      if (iy + 1 < g.ny) J = std::max(J, std::abs(v - F.values[g.index(ix, iy + 1)]));
    }
  return J;
}

}  // namespace potlab
