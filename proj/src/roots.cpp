#include "potlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace potlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// |p|(|x|), the Horner error scale.
double abs_eval(const std::vector<cplx>& c, double ax) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * ax + std::abs(*it);
  return acc;
}

void eval(const std::vector<cplx>& c, cplx x, cplx& v, cplx& d) {
  v = cplx{};
  d = cplx{};
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    d = d * x + v;
    v = v * x + *it;
  }
}

std::vector<cplx> initial_circle(const std::vector<cplx>& monic) {
  const int n = static_cast<int>(monic.size()) - 1;
  double radius = 0.0;
  if (std::abs(monic[0]) > 0.0) {
    radius = std::pow(std::abs(monic[0]), 1.0 / n);
  } else {
    for (int j = 1; j <= n; ++j) radius = std::max(radius, std::pow(std::abs(monic[n - j]), 1.0 / j));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
  const cplx centre = -monic[n - 1] / static_cast<double>(n);
  std::vector<cplx> z(n);
  for (int i = 0; i < n; ++i) z[i] = centre + std::polar(radius, kTwoPi * i / n + 0.7);
  return z;
}

}  // namespace

void sort_lexicographic(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

std::vector<cplx> polynomial_roots(const Poly& p, std::span<const cplx> guesses, RootOptions opts) {
  const int n = p.degree();
  if (n <= 0) return {};
  std::vector<cplx> c = p.coeffs();
  const cplx lead = c.back();
  for (auto& v : c) v /= lead;

  // Exact zero roots are split off first: the backward-error test below can
  // never certify a root sitting on a multiple zero at the origin.
  int zeros = 0;
  while (c[zeros] == cplx{}) ++zeros;
  if (zeros > 0) {
    std::vector<cplx> out(n);
    std::vector<cplx> rest_guess;
    if (static_cast<int>(guesses.size()) == n) {
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return std::abs(guesses[a]) < std::abs(guesses[b]); });
      std::vector<char> is_zero(n, 0);
      for (int i = 0; i < zeros; ++i) is_zero[order[i]] = 1;
      for (int i = 0; i < n; ++i)
        if (!is_zero[i]) rest_guess.push_back(guesses[i]);
      const std::vector<cplx> rest =
          polynomial_roots(Poly(std::vector<cplx>(c.begin() + zeros, c.end())), rest_guess, opts);
      size_t j = 0;
      for (int i = 0; i < n; ++i) out[i] = is_zero[i] ? cplx{} : rest[j++];
    } else {
      const std::vector<cplx> rest = polynomial_roots(Poly(std::vector<cplx>(c.begin() + zeros, c.end())), {}, opts);
      std::copy(rest.begin(), rest.end(), out.begin());
    }
    return out;
  }
  if (n == 1) return {-c[0]};

  std::vector<cplx> z;
  if (static_cast<int>(guesses.size()) == n) {
    z.assign(guesses.begin(), guesses.end());
    // coincident seeds stall Aberth; nudge them apart
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(z[i] - z[j]) <= 1e-12 * (1.0 + std::abs(z[i])))
          z[i] += std::polar(1e-7 * (1.0 + std::abs(z[i])), 0.9 + i);
  } else {
    z = initial_circle(c);
  }

  std::vector<char> done(n, 0);
  int remaining = n;
  for (int iter = 0; iter < opts.max_iter && remaining > 0; ++iter) {
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      cplx v, d;
      eval(c, z[i], v, d);
      const double err = 4.0 * n * kEps * abs_eval(c, std::abs(z[i]));
      if (std::abs(v) <= err) {
        done[i] = 1;
        --remaining;
        continue;
      }
      cplx s{};
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      cplx denom = d - v * s;
      if (denom == cplx{}) denom = cplx(kEps, kEps);
      const cplx w = v / denom;
      z[i] -= w;
      if (std::abs(w) <= 2.0 * kEps * std::abs(z[i])) {
        done[i] = 1;
        --remaining;
      }
    }
  }
  for (const auto& r : z)
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) fail(Errc::no_convergence, "root iterate diverged");
  if (remaining > 0) {
    // accept if every root still meets a loose backward-error bound
    for (int i = 0; i < n; ++i) {
      cplx v, d;
      eval(c, z[i], v, d);
      if (std::abs(v) > 1e3 * n * kEps * abs_eval(c, std::abs(z[i])))
        fail(Errc::no_convergence, "Aberth iteration did not converge within the iteration limit");
    }
  }

  // Newton polish: keep a step only if it lowers the residual.
  for (int i = 0; i < n; ++i) {
    for (int it = 0; it < 3; ++it) {
      cplx v, d;
      eval(c, z[i], v, d);
      if (d == cplx{} || v == cplx{}) break;
      const cplx cand = z[i] - v / d;
      cplx v2, d2;
      eval(c, cand, v2, d2);
      if (std::abs(v2) < std::abs(v)) z[i] = cand;
      else break;
    }
  }
  return z;
}

}  // namespace potlab
