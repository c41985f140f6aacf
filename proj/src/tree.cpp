#include "potlab/tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "potlab/quadrature.hpp"
#include "potlab/roots.hpp"

namespace potlab {

std::vector<cplx> critical_values(const Poly& Py) {
  const int k = Py.degree();
  if (k < 1) fail(Errc::invalid_input, "P(y) must have degree at least 1");
  if (std::abs(Py.coeff(0)) > 0.0) fail(Errc::invalid_input, "P(0) must vanish");
  if (Py.coeff(1) == cplx{}) fail(Errc::invalid_input, "P'(0) must be nonzero");
  if (k == 1) return {};
  const std::vector<cplx> alpha = polynomial_roots(Py.derivative());
  double size = 1.0;
  for (cplx a : alpha) size = std::max(size, 1.0 + std::abs(a));
  if (min_gap(alpha) <= tol::cluster_rel * size) fail(Errc::degenerate_critical, "P' has a multiple root");
  std::vector<cplx> sigma;
  for (cplx a : alpha) {
    const cplx v = Py(a);
    if (std::abs(v) <= 1e-14 * Py.max_abs_coeff() * std::pow(std::max(1.0, std::abs(a)), k)) {
      std::ostringstream msg;
      msg << "P vanishes at the critical point " << a;
      fail(Errc::critical_value_at_pole, msg.str());
    }
    sigma.push_back(1.0 / v);
  }
  sort_lexicographic(sigma);
  return sigma;
}

BivariatePolynomial tree_relation(const Poly& Py) { return BivariatePolynomial::from_inverse_relation(Py); }

cplx exterior_root(const BivariatePolynomial& P, cplx z) {
  const std::vector<cplx> f = solve_fiber(P, z);
  return *std::min_element(f.begin(), f.end(), [&](cplx a, cplx b) { return std::abs(a - 1.0 / z) < std::abs(b - 1.0 / z); });
}

ExteriorBranch exterior_branch(const Poly& Py, double R) {
  const std::vector<cplx> sigma = critical_values(Py);
  double smax = 0.0;
  for (cplx s : sigma) smax = std::max(smax, std::abs(s));
  if (!(R > 2.0 * smax)) fail(Errc::invalid_input, "R must exceed twice the largest critical value");
  const BivariatePolynomial P = tree_relation(Py);
  ExteriorBranch out;
  out.R = R;
  out.max_check = 0.0;
  for (int m = 0; m < 8; ++m) {
    const cplx z = std::polar(R, kTwoPi * m / 8);
    const std::vector<cplx> f = solve_fiber(P, z);
    int close = 0;
    for (cplx y : f) close += std::abs(y - 1.0 / z) < 0.1 / R;
    if (close != 1) {
      std::ostringstream msg;
      msg << close << " roots lie within 10% of 1/z at z = " << z;
      fail(Errc::ambiguous_exterior_branch, msg.str());
    }
    out.max_check = std::max(out.max_check, std::abs(z * exterior_root(P, z) - 1.0));
  }
  if (out.max_check >= 0.5) fail(Errc::ambiguous_exterior_branch, "z alpha*(z) is not close to 1 on |z| = R");
  out.value = exterior_root(P, R);
  out.a2 = (out.value - 1.0 / R) * R * R;
  return out;
}

// ---------------------------------------------------------------------------
// Tree geometry

std::vector<cplx> AnalyticTree::control_polygon(int e) const {
  const TreeEdge& E = edges[e];
  std::vector<cplx> c{nodes[E.a]};
  c.insert(c.end(), E.ctrl.begin(), E.ctrl.end());
  c.push_back(nodes[E.b]);
  return c;
}

namespace {

// Uniform Catmull-Rom through c with reflected end points; returns point and
// d/dt for the global parameter t in [0, 1].
void catmull_rom(const std::vector<cplx>& c, double t, cplx* p, cplx* dp) {
  const int m = static_cast<int>(c.size()) - 1;
  const double x = std::clamp(t, 0.0, 1.0) * m;
  const int j = std::min(m - 1, static_cast<int>(std::floor(x)));
  const double u = x - j;
  auto at = [&](int i) {
    if (i < 0) return 2.0 * c[0] - c[1];
    if (i > m) return 2.0 * c[m] - c[m - 1];
    return c[i];
  };
  const cplx P0 = at(j - 1), P1 = at(j), P2 = at(j + 1), P3 = at(j + 2);
  const cplx a1 = -P0 + P2, a2 = 2.0 * P0 - 5.0 * P1 + 4.0 * P2 - P3, a3 = -P0 + 3.0 * P1 - 3.0 * P2 + P3;
  if (p) *p = 0.5 * (2.0 * P1 + u * (a1 + u * (a2 + u * a3)));
  if (dp) *dp = 0.5 * (a1 + u * (2.0 * a2 + 3.0 * u * a3)) * static_cast<double>(m);
}

}  // namespace

cplx AnalyticTree::point(int e, double t) const {
  cplx p;
  catmull_rom(control_polygon(e), t, &p, nullptr);
  return p;
}

cplx AnalyticTree::tangent(int e, double t) const {
  cplx d;
  catmull_rom(control_polygon(e), t, nullptr, &d);
  return d;
}

std::vector<cplx> AnalyticTree::polyline(int e, int per_span) const {
  const std::vector<cplx> c = control_polygon(e);
  const int n = per_span * (static_cast<int>(c.size()) - 1);
  std::vector<cplx> out(n + 1);
  for (int i = 0; i <= n; ++i) catmull_rom(c, static_cast<double>(i) / n, &out[i], nullptr);
  out.front() = c.front();
  out.back() = c.back();
  return out;
}

double AnalyticTree::length(int e) const {
  const std::vector<cplx> p = polyline(e, 32);
  double L = 0.0;
  for (size_t i = 0; i + 1 < p.size(); ++i) L += std::abs(p[i + 1] - p[i]);
  return L;
}

std::vector<cplx> tree_points(const AnalyticTree& T, int per_span) {
  std::vector<cplx> out = T.nodes;
  for (int e = 0; e < static_cast<int>(T.edges.size()); ++e) {
    const auto p = T.polyline(e, per_span);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  auto one = [](const std::vector<cplx>& p, const std::vector<cplx>& q) {
    double worst = 0.0;
    for (cplx x : p) {
      double best = INFINITY;
      for (cplx y : q) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one(a, b), one(b, a));
}

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool on_segment(cplx p, cplx q, cplx r) {
  return std::min(p.real(), q.real()) <= r.real() && r.real() <= std::max(p.real(), q.real()) &&
         std::min(p.imag(), q.imag()) <= r.imag() && r.imag() <= std::max(p.imag(), q.imag());
}

// Closed segments [p1, p2] and [q1, q2] share a point.
bool segments_meet(cplx p1, cplx p2, cplx q1, cplx q2) {
  if (std::max(p1.real(), p2.real()) < std::min(q1.real(), q2.real()) ||
      std::max(q1.real(), q2.real()) < std::min(p1.real(), p2.real()) ||
      std::max(p1.imag(), p2.imag()) < std::min(q1.imag(), q2.imag()) ||
      std::max(q1.imag(), q2.imag()) < std::min(p1.imag(), p2.imag()))
    return false;
  const double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

// Segment soup with bounding boxes per run of 32 segments.
struct Segments {
  struct Box {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    void grow(cplx p) {
      xmin = std::min(xmin, p.real()), xmax = std::max(xmax, p.real());
      ymin = std::min(ymin, p.imag()), ymax = std::max(ymax, p.imag());
    }
    bool misses(cplx p, cplx q) const {
      return std::max(p.real(), q.real()) < xmin || std::min(p.real(), q.real()) > xmax ||
             std::max(p.imag(), q.imag()) < ymin || std::min(p.imag(), q.imag()) > ymax;
    }
  };
  std::vector<cplx> a, b;
  std::vector<Box> boxes;
  Box all;
  void add(cplx p, cplx q) {
    if (a.size() % 32 == 0) boxes.emplace_back();
    a.push_back(p);
    b.push_back(q);
    boxes.back().grow(p), boxes.back().grow(q);
    all.grow(p), all.grow(q);
  }
  bool hits(cplx p, cplx q) const {
    if (all.misses(p, q)) return false;
    for (size_t c = 0; c < boxes.size(); ++c) {
      if (boxes[c].misses(p, q)) continue;
      for (size_t i = 32 * c; i < std::min(a.size(), 32 * c + 32); ++i)
        if (segments_meet(p, q, a[i], b[i])) return true;
    }
    return false;
  }
};

int find(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

std::string tree_problem(const AnalyticTree& T, const std::vector<cplx>& required) {
  const int n = static_cast<int>(T.nodes.size());
  if (n == 0) return "tree has no nodes";
  double size = 0.0;
  for (cplx z : T.nodes) size = std::max(size, std::abs(z));
  const double ctol = tol::cluster_rel * (1.0 + size);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(T.nodes[i] - T.nodes[j]) <= ctol) return "nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide";
  for (cplx r : required) {
    bool found = false;
    for (cplx z : T.nodes) found = found || std::abs(z - r) <= ctol;
    if (!found) {
      std::ostringstream msg;
      msg << "required point " << r << " is not a node";
      return msg.str();
    }
  }
  if (static_cast<int>(T.edges.size()) != n - 1) return "a tree on " + std::to_string(n) + " nodes needs " + std::to_string(n - 1) + " edges";
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const TreeEdge& e : T.edges) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n || e.a == e.b) return "edge with invalid endpoints";
    const int ra = find(parent, e.a), rb = find(parent, e.b);
    if (ra == rb) return "edges form a cycle";
    parent[ra] = rb;
  }
  // n - 1 edges without a cycle connect all nodes
  const int E = static_cast<int>(T.edges.size());
  std::vector<std::vector<cplx>> poly(E);
  for (int e = 0; e < E; ++e) poly[e] = T.polyline(e);
  for (int e = 0; e < E; ++e) {
    const auto& p = poly[e];
    for (size_t i = 0; i + 1 < p.size(); ++i)
      for (size_t j = i + 2; j + 1 < p.size(); ++j)
        if (segments_meet(p[i], p[i + 1], p[j], p[j + 1])) return "arc " + std::to_string(e) + " intersects itself";
  }
  for (int e = 0; e < E; ++e)
    for (int f = e + 1; f < E; ++f) {
      const auto &p = poly[e], &q = poly[f];
      const TreeEdge &A = T.edges[e], &B = T.edges[f];
      for (size_t i = 0; i + 1 < p.size(); ++i)
        for (size_t j = 0; j + 1 < q.size(); ++j) {
          if (!segments_meet(p[i], p[i + 1], q[j], q[j + 1])) continue;
          // segments touching a shared endpoint may meet there
          const bool pi_a = i == 0, pi_b = i + 2 == p.size(), qj_a = j == 0, qj_b = j + 2 == q.size();
          const bool shared = (pi_a && qj_a && A.a == B.a) || (pi_a && qj_b && A.a == B.b) ||
                              (pi_b && qj_a && A.b == B.a) || (pi_b && qj_b && A.b == B.b);
          if (shared) {
            const cplx node = pi_a ? p.front() : p.back();
            const cplx u = (pi_a ? p[1] : p[p.size() - 2]) - node, v = (qj_a ? q[1] : q[q.size() - 2]) - node;
            if (std::abs(cross(u, v)) > 1e-12 * std::abs(u) * std::abs(v) || (u * std::conj(v)).real() < 0.0) continue;
          }
          return "arcs " + std::to_string(e) + " and " + std::to_string(f) + " intersect";
        }
    }
  return {};
}

void validate_tree(const AnalyticTree& T, const std::vector<cplx>& required) {
  const std::string p = tree_problem(T, required);
  if (!p.empty()) fail(Errc::invalid_tree, p);
}

AnalyticTree star_tree(const std::vector<cplx>& sigma, int ctrl_per_edge) {
  AnalyticTree T;
  T.nodes = sigma;
  T.nodes.push_back(0.0);
  const int origin = static_cast<int>(sigma.size());
  for (int s = 0; s < origin; ++s) {
    TreeEdge e{s, origin, {}};
    for (int c = 1; c <= ctrl_per_edge; ++c) e.ctrl.push_back(sigma[s] * (1.0 - static_cast<double>(c) / (ctrl_per_edge + 1)));
    T.edges.push_back(std::move(e));
  }
  return T;
}

// ---------------------------------------------------------------------------
// Jump measure

namespace {

struct ContourMark {
  size_t vertex;
  int edge;
  bool plus;
};

double node_exponent(cplx z, const std::vector<cplx>& sigma, int k, double ctol) {
  if (std::abs(z) <= ctol) return -1.0 / k;
  for (cplx s : sigma)
    if (std::abs(z - s) <= ctol) return 0.5;
  return 0.0;
}

// Parameter where the arc leaves the disk of radius rho about its end node.
double trim_param(const AnalyticTree& T, int e, bool at_start, double rho) {
  const cplx v = T.nodes[at_start ? T.edges[e].a : T.edges[e].b];
  double lo = at_start ? 0.0 : 1.0, hi = 0.5;
  if (std::abs(T.point(e, hi) - v) <= rho) return hi;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(T.point(e, mid) - v) < rho) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Samples per edge so that chords stay within `sag` of the arc.
int chord_count(const AnalyticTree& T, int e, double sag) {
  const int spans = static_cast<int>(T.edges[e].ctrl.size()) + 1;
  const int probe = 64 * spans;
  double kappa = 0.0, L = 0.0;
  cplx prev = T.point(e, 0.0);
  for (int i = 0; i < probe; ++i) {
    const double t0 = (i + 0.1) / probe, t1 = (i + 0.9) / probe;
    const cplx d0 = T.tangent(e, t0), d1 = T.tangent(e, t1);
    const cplx dd = (d1 - d0) / (t1 - t0);
    kappa = std::max(kappa, std::abs(cross(d0, dd)) / std::pow(std::abs(d0), 3));
    const cplx next = T.point(e, static_cast<double>(i + 1) / probe);
    L += std::abs(next - prev);
    prev = next;
  }
  // a chord of length l on curvature kappa sags by l^2 kappa / 8
  const double n = L * std::sqrt(kappa / (8.0 * sag));
  return std::clamp(static_cast<int>(std::ceil(n)), 16 * spans, 8192);
}

}  // namespace

TreeMeasure tree_measure(const AnalyticTree& T, const Poly& Py, TreeOptions opts) {
  const int k = Py.degree();
  const std::vector<cplx> sigma = critical_values(Py);
  std::vector<cplx> required = sigma;
  required.push_back(0.0);
  validate_tree(T, required);
  TreeMeasure out;
  const int E = static_cast<int>(T.edges.size());
  if (E == 0) return out;
  if (opts.nodes_per_edge < 2) fail(Errc::invalid_input, "need at least two samples per edge");

  const BivariatePolynomial P = tree_relation(Py);
  const SingularSet S = discriminant_nodes(P);
  double size = 0.0;
  for (cplx z : T.nodes) size = std::max(size, std::abs(z));
  const double ctol = tol::cluster_rel * (1.0 + size);

  // Sample parameters and the mid sample of every edge.
  std::vector<double> len(E);
  std::vector<int> mid(E);
  out.edges.resize(E);
  for (int e = 0; e < E; ++e) {
    EdgeDensity& d = out.edges[e];
    d.edge = e;
    d.start_exp = node_exponent(T.nodes[T.edges[e].a], sigma, k, ctol);
    d.end_exp = node_exponent(T.nodes[T.edges[e].b], sigma, k, ctol);
    const ArcRule r = endpoint_singular_rule(1.0, opts.nodes_per_edge, d.start_exp, d.end_exp);
    d.t = r.s;
    d.weights = r.weights;
    for (double t : d.t) {
      d.z.push_back(T.point(e, t));
      const cplx dz = T.tangent(e, t);
      d.speed.push_back(std::abs(dz));
    }
    len[e] = T.length(e);
    mid[e] = static_cast<int>(std::min_element(d.t.begin(), d.t.end(), [](double a, double b) {
                                return std::abs(a - 0.5) < std::abs(b - 0.5);
                              }) - d.t.begin());
  }

  // Node disks: the contour turns around each node at radius rho.
  const int n = static_cast<int>(T.nodes.size());
  std::vector<double> rho(n, INFINITY);
  for (int e = 0; e < E; ++e) {
    rho[T.edges[e].a] = std::min(rho[T.edges[e].a], 0.1 * len[e]);
    rho[T.edges[e].b] = std::min(rho[T.edges[e].b], 0.1 * len[e]);
  }
  std::vector<std::array<double, 2>> trim(E);
  std::vector<double> eps(E);
  std::vector<int> fine(E);
  for (int e = 0; e < E; ++e) {
    eps[e] = opts.side_eps_rel * len[e];
    fine[e] = chord_count(T, e, eps[e] / 10);
    trim[e] = {trim_param(T, e, true, rho[T.edges[e].a]), trim_param(T, e, false, rho[T.edges[e].b])};
    const double tm = out.edges[e].t[mid[e]];
    if (!(trim[e][0] < tm && tm < trim[e][1])) fail(Errc::side_collision, "node disks cover the middle of an arc");
  }

  // Edges around each node, counterclockwise by outgoing direction.
  std::vector<std::vector<std::pair<double, int>>> around(n);  // (angle, +-(e + 1)): + leaves at a, - leaves at b
  for (int e = 0; e < E; ++e) {
    around[T.edges[e].a].push_back({std::arg(T.tangent(e, 0.0)), e + 1});
    around[T.edges[e].b].push_back({std::arg(-T.tangent(e, 1.0)), -(e + 1)});
  }
  for (auto& v : around) std::sort(v.begin(), v.end());

  // Euler tour with the tree on the left: the right side of a -> b is the
  // minus side (normal i z'), of b -> a the plus side.
  std::vector<cplx> contour;
  std::vector<ContourMark> marks;
  auto traverse = [&](int e, bool forward) {
    const cplx sgn = forward ? cplx(0, -1) : cplx(0, 1);
    std::vector<double> ts;
    const int dense = fine[e];
    for (int i = 1; i < dense; ++i) {
      const double t = static_cast<double>(i) / dense;
      if (t > trim[e][0] && t < trim[e][1]) ts.push_back(t);
    }
    const double tm = out.edges[e].t[mid[e]];
    ts.push_back(trim[e][0]);
    ts.push_back(trim[e][1]);
    ts.push_back(tm);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (!forward) std::reverse(ts.begin(), ts.end());
    for (double t : ts) {
      const cplx dz = T.tangent(e, t);
      contour.push_back(T.point(e, t) + eps[e] * sgn * dz / std::abs(dz));
      if (t == tm) marks.push_back({contour.size() - 1, e, !forward});
    }
  };
  auto next_after = [&](int v, int incoming) {
    const auto& list = around[v];
    const size_t at = std::find_if(list.begin(), list.end(), [&](const auto& p) { return p.second == incoming; }) - list.begin();
    return list[(at + 1) % list.size()].second;
  };
  int code = 1;  // edge 0 leaving node a
  for (int step = 0; step < 2 * E; ++step) {
    const int e = std::abs(code) - 1;
    const bool forward = code > 0;
    traverse(e, forward);
    const int v = forward ? T.edges[e].b : T.edges[e].a;
    const int incoming = forward ? -(e + 1) : (e + 1);  // code of this edge as seen leaving v
    code = next_after(v, incoming);
    const int ne = std::abs(code) - 1;
    const double t_out = code > 0 ? trim[ne][0] : trim[ne][1];
    const cplx dz = T.tangent(ne, t_out);
    const cplx q_out = T.point(ne, t_out) + eps[ne] * (code > 0 ? cplx(0, -1) : cplx(0, 1)) * dz / std::abs(dz);
    const cplx c = T.nodes[v], q_in = contour.back();
    const double r0 = std::abs(q_in - c), r1 = std::abs(q_out - c);
    const double th0 = std::arg(q_in - c);
    double sweep = std::arg(q_out - c) - th0;
    while (sweep <= 0.0) sweep += kTwoPi;
    const int m = std::max(2, static_cast<int>(std::ceil(sweep / (kPi / 16))));
    for (int j = 1; j < m; ++j) contour.push_back(c + std::polar(r0 + (r1 - r0) * j / m, th0 + sweep * j / m));
  }

  Segments tree_segs;
  for (int e = 0; e < E; ++e)
    for (int i = 0; i < fine[e]; ++i) tree_segs.add(T.point(e, static_cast<double>(i) / fine[e]), T.point(e, static_cast<double>(i + 1) / fine[e]));
  for (size_t i = 0; i < contour.size(); ++i)
    if (tree_segs.hits(contour[i], contour[(i + 1) % contour.size()]))
      fail(Errc::side_collision, "the offset contour meets the tree; side_eps too large near a node");

  // Escape route from far away to the contour.
  cplx centroid = 0.0;
  for (cplx z : T.nodes) centroid += z;
  centroid /= static_cast<double>(n);
  const double far = 4.0 * size + 4.0;
  std::vector<size_t> order(contour.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(contour[a] - centroid) > std::abs(contour[b] - centroid);
  });
  size_t start = contour.size();
  cplx base;
  for (size_t r = 0; r < std::min<size_t>(order.size(), 64) && start == contour.size(); ++r) {
    const cplx c = contour[order[r]];
    const cplx u = (c - centroid) / std::abs(c - centroid);
    const cplx B = centroid + far * u;
    if (!tree_segs.hits(c, B)) start = order[r], base = B;
  }
  if (start == contour.size()) fail(Errc::continuation_blocked, "no straight escape from the tree complement");

  std::vector<cplx> path{base};
  std::vector<size_t> where(contour.size());
  for (size_t j = 0; j < contour.size(); ++j) {
    where[(start + j) % contour.size()] = path.size();
    path.push_back(contour[(start + j) % contour.size()]);
  }
  double clear = INFINITY;
  for (cplx z : path) clear = std::min(clear, S.distance(z));
  ContinuationOptions copts;
  copts.clearance = 0.25 * clear;
  const std::vector<cplx> first = solve_fiber(P, base);
  const int star = static_cast<int>(std::min_element(first.begin(), first.end(), [&](cplx a, cplx b) {
                                      return std::abs(a - 1.0 / base) < std::abs(b - 1.0 / base);
                                    }) - first.begin());
  const BranchTrack tour = continue_branches(P, S, path, first, copts);

  std::vector<cplx> side_plus(E), side_minus(E);
  for (const ContourMark& mk : marks) {
    const std::vector<cplx>& roots = tour.samples[tour.vertex_sample[where[mk.vertex]]].roots;
    const cplx zm = out.edges[mk.edge].z[mid[mk.edge]];
    const cplx limit = solve_fiber_near(P, zm, roots)[star];
    (mk.plus ? side_plus : side_minus)[mk.edge] = limit;
  }

  // Carry both side limits along each arc from its middle to its ends.
  for (int e = 0; e < E; ++e) {
    EdgeDensity& d = out.edges[e];
    const size_t N = d.t.size();
    d.plus.assign(N, 0.0);
    d.minus.assign(N, 0.0);
    const cplx zm = d.z[mid[e]];
    const std::vector<cplx> F0 = solve_fiber(P, zm);
    auto nearest = [&](cplx y) {
      return static_cast<int>(std::min_element(F0.begin(), F0.end(), [&](cplx a, cplx b) {
                                return std::abs(a - y) < std::abs(b - y);
                              }) - F0.begin());
    };
    const int ip = nearest(side_plus[e]), im = nearest(side_minus[e]);
    d.plus[mid[e]] = F0[ip];
    d.minus[mid[e]] = F0[im];
    const int spans = static_cast<int>(T.edges[e].ctrl.size()) + 1;
    for (int dir : {1, -1}) {
      std::vector<std::pair<double, int>> stops;  // (t, sample index or -1)
      for (size_t i = 0; i < N; ++i)
        if ((d.t[i] - d.t[mid[e]]) * dir > 0) stops.push_back({d.t[i], static_cast<int>(i)});
      if (stops.empty()) continue;
      const double tm = d.t[mid[e]], tend = stops.back().first;
      for (int i = 1; i < 16 * spans; ++i) {
        const double t = static_cast<double>(i) / (16 * spans);
        if ((t - tm) * dir > 0 && (tend - t) * dir > 0) stops.push_back({t, -1});
      }
      std::sort(stops.begin(), stops.end());
      if (dir < 0) std::reverse(stops.begin(), stops.end());
      std::vector<cplx> arc{zm};
      for (const auto& s : stops) arc.push_back(T.point(e, s.first));
      double c = INFINITY;
      for (cplx z : arc) c = std::min(c, S.distance(z));
      ContinuationOptions aopts;
      aopts.clearance = 0.25 * c;
      const BranchTrack tr = continue_branches(P, S, arc, F0, aopts);
      for (size_t j = 0; j < stops.size(); ++j) {
        if (stops[j].second < 0) continue;
        const std::vector<cplx>& roots = tr.samples[tr.vertex_sample[j + 1]].roots;
        d.plus[stops[j].second] = roots[ip];
        d.minus[stops[j].second] = roots[im];
      }
    }
    const cplx c = cplx(0, 1) / kTwoPi;
    for (size_t i = 0; i < N; ++i) d.f.push_back(c * (d.plus[i] - d.minus[i]) * T.tangent(e, d.t[i]));
  }
  return out;
}

cplx tree_cauchy(const TreeMeasure& m, cplx z) {
  cplx sum = 0.0;
  for (const EdgeDensity& d : m.edges)
    for (size_t i = 0; i < d.t.size(); ++i) sum += d.weights[i] * d.f[i] / (z - d.z[i]);
  return sum;
}

TreeScore score_tree(const TreeMeasure& m) {
  TreeScore s;
  for (const EdgeDensity& d : m.edges)
    for (size_t i = 0; i < d.t.size(); ++i) {
      const cplx f = d.f[i];
      s.mass += d.weights[i] * f;
      s.total_variation += d.weights[i] * std::abs(f);
      s.positivity_defect += d.weights[i] * (std::max(0.0, -f.real()) + std::abs(f.imag()));
    }
  return s;
}

// ---------------------------------------------------------------------------
// Search

namespace {

TreeEdge straight_edge(const AnalyticTree& T, int a, int b, int ctrl) {
  TreeEdge e{a, b, {}};
  for (int c = 1; c <= ctrl; ++c) {
    const double s = static_cast<double>(c) / (ctrl + 1);
    e.ctrl.push_back(T.nodes[a] + s * (T.nodes[b] - T.nodes[a]));
  }
  return e;
}

std::vector<int> component_of(const AnalyticTree& T, int skip_edge, int from) {
  std::vector<char> seen(T.nodes.size(), 0);
  std::vector<int> stack{from}, out;
  seen[from] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (int e = 0; e < static_cast<int>(T.edges.size()); ++e) {
      if (e == skip_edge) continue;
      const TreeEdge& E = T.edges[e];
      const int w = E.a == v ? E.b : (E.b == v ? E.a : -1);
      if (w >= 0 && !seen[w]) seen[w] = 1, stack.push_back(w);
    }
  }
  return out;
}

void remove_node(AnalyticTree& T, int v) {
  T.nodes.erase(T.nodes.begin() + v);
  for (TreeEdge& e : T.edges) {
    if (e.a > v) --e.a;
    if (e.b > v) --e.b;
  }
}

}  // namespace

SearchResult search_tree(const Poly& Py, SearchConfig cfg) {
  const int k = Py.degree();
  const std::vector<cplx> sigma = critical_values(Py);
  const int fixed = static_cast<int>(sigma.size()) + 1;
  const int max_steiner = std::max(0, k - 2);
  double D = 1.0;
  for (cplx s : sigma) D = std::max(D, std::abs(s));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto pick = [&](int n) { return static_cast<int>(unif(rng) * n) % n; };

  auto evaluate = [&](const AnalyticTree& T) -> std::optional<TreeScore> {
    try {
      return score_tree(tree_measure(T, Py));
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  SearchResult res;
  AnalyticTree cur = star_tree(sigma);
  const auto s0 = evaluate(cur);
  if (!s0) fail(Errc::invalid_input, "the star tree cannot be scored");
  TreeScore cur_score = *s0;
  res.best = cur;
  res.best_score = cur_score;
  res.initial_objective = cur_score.objective();
  if (cur.edges.empty()) return res;

  double temp = cfg.t0;
  for (int it = 1; it <= cfg.iterations; ++it) {
    temp *= cfg.decay;
    const double scale = cfg.move_scale * D * std::max(temp, 1e-3);
    AnalyticTree prop = cur;
    const int steiner = static_cast<int>(prop.nodes.size()) - fixed;
    if (unif(rng) < cfg.rewire_prob) {
      const int kind = pick(3);
      if (kind == 0 && prop.edges.size() > 1) {
        // cut an edge and reconnect the two parts elsewhere
        const int e = pick(static_cast<int>(prop.edges.size()));
        const std::vector<int> left = component_of(prop, e, prop.edges[e].a);
        std::vector<char> in_left(prop.nodes.size(), 0);
        for (int v : left) in_left[v] = 1;
        std::vector<int> right;
        for (int v = 0; v < static_cast<int>(prop.nodes.size()); ++v)
          if (!in_left[v]) right.push_back(v);
        const int a = left[pick(static_cast<int>(left.size()))], b = right[pick(static_cast<int>(right.size()))];
        prop.edges[e] = straight_edge(prop, a, b, 2);
      } else if (kind == 1 && steiner < max_steiner) {
        // split an edge at its middle with a new Steiner point
        const int e = pick(static_cast<int>(prop.edges.size()));
        const TreeEdge old = prop.edges[e];
        prop.nodes.push_back(prop.point(e, 0.5));
        const int s = static_cast<int>(prop.nodes.size()) - 1;
        prop.edges[e] = straight_edge(prop, old.a, s, 2);
        prop.edges.push_back(straight_edge(prop, s, old.b, 2));
      } else if (kind == 2 && steiner > 0) {
        const int s = fixed + pick(steiner);
        std::vector<int> inc;
        for (int e = 0; e < static_cast<int>(prop.edges.size()); ++e)
          if (prop.edges[e].a == s || prop.edges[e].b == s) inc.push_back(e);
        if (inc.size() == 1) {
          prop.edges.erase(prop.edges.begin() + inc[0]);
          remove_node(prop, s);
        } else if (inc.size() == 2) {
          const TreeEdge e0 = prop.edges[inc[0]], e1 = prop.edges[inc[1]];
          const int a = e0.a == s ? e0.b : e0.a, b = e1.a == s ? e1.b : e1.a;
          prop.edges.erase(prop.edges.begin() + inc[1]);
          prop.edges[inc[0]] = straight_edge(prop, a, b, 2);
          remove_node(prop, s);
        }
      }
    } else if (steiner > 0 && unif(rng) < 0.3) {
      const int s = fixed + pick(steiner);
      prop.nodes[s] += scale * cplx(gauss(rng), gauss(rng));
    } else {
      const int e = pick(static_cast<int>(prop.edges.size()));
      auto& ctrl = prop.edges[e].ctrl;
      if (!ctrl.empty()) ctrl[pick(static_cast<int>(ctrl.size()))] += scale * cplx(gauss(rng), gauss(rng));
    }

    const auto sc = evaluate(prop);
    TraceRow row{it, std::nan(""), cplx{}, 0.0, 0.0, false, res.best_score.objective()};
    if (sc) {
      row.objective = sc->objective();
      row.mass = sc->mass;
      row.tv = sc->total_variation;
      row.defect = sc->positivity_defect;
      const double delta = row.objective - cur_score.objective();
      if (delta <= 0.0 || unif(rng) < std::exp(-delta / temp)) {
        row.accepted = true;
        cur = std::move(prop);
        cur_score = *sc;
        if (cur_score.objective() < res.best_score.objective()) {
          res.best = cur;
          res.best_score = cur_score;
        }
      }
    }
    row.best = res.best_score.objective();
    res.trace.push_back(row);
  }
  return res;
}

}  // namespace potlab
