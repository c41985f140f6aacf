#include "potlab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <algorithm>
#include <tuple>

namespace potlab {

namespace {

QuadratureRule golub_welsch(int n, double a, double b) {
  if (n < 1) fail(Errc::invalid_input, "quadrature order must be positive");
  if (!(a > -1.0) || !(b > -1.0)) fail(Errc::invalid_input, "Jacobi exponents must exceed -1");
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * k + ab;
    diag(k) = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (t * (t + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + ab;
    double v;
    if (k == 1) {
      // (t - 1) cancels against k + a + b; keeps a + b = -1 finite
      v = 4.0 * (1.0 + a) * (1.0 + b) / ((t * t) * (t + 1.0));
    } else {
      v = 4.0 * k * (k + a) * (k + b) * (k + ab) / ((t * t) * (t + 1.0) * (t - 1.0));
    }
    sub(k - 1) = std::sqrt(v);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(ab + 2.0));
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_jacobi(int n, double a, double b) {
  static std::mutex mu;
  static std::map<std::tuple<int, double, double>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{n, a, b}];
  if (!slot) slot = std::make_unique<QuadratureRule>(golub_welsch(n, a, b));
  return *slot;
}

ArcRule endpoint_singular_rule(double length, int n, double start_exp, double end_exp) {
  // weight s^start (L-s)^end with u = 2s/L - 1 is (L/2)^(start+end) (1+u)^start (1-u)^end
  const QuadratureRule& r = gauss_jacobi(n, end_exp, start_exp);
  ArcRule out;
  out.s.resize(n);
  out.weights.resize(n);
  const double half = 0.5 * length;
  for (int i = 0; i < n; ++i) {
    const double u = r.nodes[i];
    out.s[i] = half * (u + 1.0);
    const double w = std::pow(1.0 + u, start_exp) * std::pow(1.0 - u, end_exp);
    out.weights[i] = half * r.weights[i] / w;
  }
  return out;
}

namespace {

using VecFn = std::function<void(double, std::span<cplx>)>;

std::vector<cplx> panel(const VecFn& f, int n, double a, double b) {
  const QuadratureRule& r = gauss_legendre(10);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<cplx> acc(n), v(n);
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    f(mid + half * r.nodes[i], v);
    for (int c = 0; c < n; ++c) acc[c] += r.weights[i] * v[c];
  }
  for (auto& x : acc) x *= half;
  return acc;
}

}  // namespace

std::vector<cplx> adaptive_gauss_legendre(const VecFn& f, int n, double a, double b, double tol, int max_depth) {
  if (a == b) return std::vector<cplx>(n);
  // Global strategy: keep splitting the panel with the largest error
  // estimate until the estimates sum below tol.
  struct Panel {
    double a, b;
    std::vector<cplx> value;
    double err;
    int depth;
  };
  auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  auto push_split = [&](const Panel& p) {
    const double m = 0.5 * (p.a + p.b);
    Panel l{p.a, m, panel(f, n, p.a, m), 0.0, p.depth + 1};
    Panel r{m, p.b, panel(f, n, m, p.b), 0.0, p.depth + 1};
    double e = 0.0;
    for (int c = 0; c < n; ++c) e = std::max(e, std::abs(l.value[c] + r.value[c] - p.value[c]));
    l.err = r.err = 0.5 * e;
    heap.push(std::move(l));
    heap.push(std::move(r));
    return e;
  };
  double total = push_split(Panel{a, b, panel(f, n, a, b), 0.0, 0});
  while (total > tol) {
    Panel worst = heap.top();
    heap.pop();
    if (worst.depth >= max_depth)
      fail(Errc::quadrature_no_convergence, "adaptive Gauss-Legendre exceeded its bisection depth");
    total -= worst.err;
    total += push_split(worst);
  }
  // sum in position order for reproducible rounding
  std::vector<Panel> all;
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::vector<cplx> acc(n);
  for (const auto& p : all)
    for (int c = 0; c < n; ++c) acc[c] += p.value[c];
  return acc;
}

cplx adaptive_gauss_legendre(const std::function<cplx(double)>& f, double a, double b, double tol, int max_depth) {
  const auto v = adaptive_gauss_legendre([&](double x, std::span<cplx> out) { out[0] = f(x); }, 1, a, b, tol, max_depth);
  return v[0];
}

}  // namespace potlab
