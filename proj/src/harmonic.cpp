#include "potlab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "potlab/quadrature.hpp"

namespace potlab {

HarmonicTuple::HarmonicTuple(BivariatePolynomial P, cplx base, std::vector<cplx> base_labels,
                             std::vector<double> constants)
    : k_(P.degree_y()), base_(base), P_(std::move(P)) {
  S_ = discriminant_nodes(*P_);
  if (S_.distance(base) <= 0.5 * S_.safety_radius) {
    std::ostringstream msg;
    msg << "base point " << base << " is within safety_radius/2 of the singular set";
    fail(Errc::path_hits_singular_set, msg.str());
  }
  if (base_labels.empty()) {
    labels_ = solve_fiber(*P_, base);
  } else {
    if (static_cast<int>(base_labels.size()) != k_) fail(Errc::invalid_input, "base labels must have k entries");
    for (cplx y : base_labels)
      if (P_->residual(base, y) > 1e3 * tol::residual) fail(Errc::invalid_input, "base labels do not solve the fiber");
    labels_ = std::move(base_labels);
  }
  set_constants(std::move(constants));
}

HarmonicTuple HarmonicTuple::from_branches(std::vector<Poly> branches, cplx base, std::vector<double> constants) {
  if (branches.empty()) fail(Errc::invalid_input, "need at least one branch");
  HarmonicTuple H;
  H.k_ = static_cast<int>(branches.size());
  H.base_ = base;
  H.q_ = std::move(branches);
  for (const Poly& q : H.q_) {
    Poly Q = q.antiderivative();
    Q -= Poly::constant(Q(base));
    H.Q_.push_back(std::move(Q));
    H.dq_.push_back(q.derivative());
    H.labels_.push_back(q(base));
  }
  try {
    H.P_ = BivariatePolynomial::from_branches(H.q_);
  } catch (const Error&) {
    H.P_.reset();  // repeated branches: no squarefree relation, values are still exact
  }
  H.S_.safety_radius = 0.0;
  H.set_constants(std::move(constants));
  return H;
}

void HarmonicTuple::set_constants(std::vector<double> c) {
  if (c.empty()) c.assign(k_, 0.0);
  if (static_cast<int>(c.size()) != k_) fail(Errc::invalid_input, "need one constant per branch");
  c_ = std::move(c);
}

const BivariatePolynomial& HarmonicTuple::polynomial() const {
  if (!P_) fail(Errc::invalid_input, "explicit branches are not distinct; no squarefree relation");
  return *P_;
}

std::vector<cplx> HarmonicTuple::canonical_path(cplx z) const {
  if (is_explicit() || S_.points.empty()) return {base_, z};
  const double r = S_.safety_radius;
  if (S_.distance(z) <= 0.5 * r) {
    std::ostringstream msg;
    msg << "point " << z << " is within safety_radius/2 of the singular set";
    fail(Errc::path_hits_singular_set, msg.str());
  }
  const cplx p = base_;
  const double L = std::abs(z - p);
  if (L == 0.0) return {p, z};
  const cplx u = (z - p) / L;

  struct Hit {
    cplx s;
    double t1, t2;
  };
  std::vector<Hit> hits;
  for (const auto& sp : S_.points) {
    const cplx rel = (sp.z - p) * std::conj(u);
    const double delta = std::abs(rel.imag());
    if (delta >= r) continue;
    const double w = std::sqrt(r * r - delta * delta);
    const double t1 = rel.real() - w, t2 = rel.real() + w;
    if (t2 <= 0.0 || t1 >= L) continue;
    hits.push_back({sp.z, t1, t2});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.t1 < b.t1; });

  std::vector<cplx> path{p};
  for (const auto& h : hits) {
    const cplx e = h.t1 > 0.0 ? p + h.t1 * u : h.s + r * (p - h.s) / std::abs(p - h.s);
    const cplx x = h.t2 < L ? p + h.t2 * u : h.s + r * (z - h.s) / std::abs(z - h.s);
    path.push_back(e);
    const double th_e = std::arg(e - h.s);
    double sweep = std::arg(x - h.s) - th_e;
    while (sweep < 0.0) sweep += kTwoPi;
    const int n = std::max(1, static_cast<int>(std::ceil(sweep / (kPi / 16.0))));
    for (int m = 1; m < n; ++m) path.push_back(h.s + std::polar(r, th_e + sweep * m / n));
    path.push_back(x);
  }
  path.push_back(z);
  return path;
}

Frame HarmonicTuple::integrate_track(const BranchTrack& track, const std::vector<cplx>& A0, double tol) const {
  const BivariatePolynomial& P = *P_;
  double total = 0.0;
  for (size_t m = 0; m + 1 < track.samples.size(); ++m)
    total += std::abs(track.samples[m + 1].z - track.samples[m].z);
  std::vector<cplx> A = A0;
  for (size_t m = 0; m + 1 < track.samples.size(); ++m) {
    const BranchSample& a = track.samples[m];
    const BranchSample& b = track.samples[m + 1];
    const cplx dz = b.z - a.z;
    if (dz == cplx{}) continue;
    auto f = [&](double tau, std::span<cplx> out) {
      const std::vector<cplx>& ref = tau < 0.5 ? a.roots : b.roots;
      const std::vector<cplx> y = solve_fiber_near(P, a.z + tau * dz, ref);
      for (int nu = 0; nu < k_; ++nu) out[nu] = y[nu] * dz;
    };
    const double seg_tol = tol * std::max(std::abs(dz) / total, 1e-3);
    const std::vector<cplx> part = adaptive_gauss_legendre(f, k_, 0.0, 1.0, seg_tol);
    for (int nu = 0; nu < k_; ++nu) A[nu] += part[nu];
  }
  return {track.samples.back().z, track.samples.back().roots, std::move(A)};
}

Frame HarmonicTuple::frame_along(std::span<const cplx> path) const {
  if (path.empty()) fail(Errc::invalid_input, "empty path");
  if (std::abs(path.front() - base_) > 1e-12 * (1.0 + std::abs(base_)))
    fail(Errc::invalid_input, "path must start at the base point");
  if (is_explicit()) {
    const cplx z = path.back();
    Frame f{z, {}, {}};
    for (int nu = 0; nu < k_; ++nu) {
      f.g.push_back(q_[nu](z));
      f.A.push_back(Q_[nu](z));
    }
    return f;
  }
  const BranchTrack track = continue_branches(*P_, S_, path, labels_);
  return integrate_track(track, std::vector<cplx>(k_), tol::quad);
}

Frame HarmonicTuple::frame_at(cplx z) const {
  if (is_explicit()) return frame_along(std::vector<cplx>{base_, z});
  const std::pair<double, double> key{z.real(), z.imag()};
  {
    std::lock_guard lock(cache_->mu);
    auto it = cache_->frames.find(key);
    if (it != cache_->frames.end()) return it->second;
  }
  Frame f = frame_along(canonical_path(z));
  std::lock_guard lock(cache_->mu);
  cache_->frames.emplace(key, f);
  return f;
}

Frame HarmonicTuple::advance(const Frame& f, cplx z) const {
  if (is_explicit()) {
    Frame out{z, {}, {}};
    for (int nu = 0; nu < k_; ++nu) {
      out.g.push_back(q_[nu](z));
      out.A.push_back(Q_[nu](z));
    }
    return out;
  }
  const std::vector<cplx> path{f.z, z};
  const BranchTrack track = continue_branches(*P_, S_, path, f.g);
  return integrate_track(track, f.A, tol::quad);
}

std::vector<cplx> HarmonicTuple::branch_derivatives(const Frame& f) const {
  std::vector<cplx> d(k_);
  for (int nu = 0; nu < k_; ++nu) {
    if (is_explicit()) {
      d[nu] = dq_[nu](f.z);
    } else {
      d[nu] = -P_->dz(f.z, f.g[nu]) / P_->dy(f.z, f.g[nu]);
    }
  }
  return d;
}

namespace {

void check_index(const HarmonicTuple& H, int nu) {
  if (nu < 0 || nu >= H.size()) fail(Errc::invalid_input, "branch index out of range");
}

}  // namespace

cplx primitive(const HarmonicTuple& H, int nu, cplx z, std::span<const cplx> path) {
  check_index(H, nu);
  if (path.empty()) return H.frame_at(z).A[nu];
  if (std::abs(path.back() - z) > 1e-12 * (1.0 + std::abs(z))) fail(Errc::invalid_input, "path must end at z");
  return H.frame_along(path).A[nu];
}

double harmonic_value(const HarmonicTuple& H, int nu, cplx z, std::span<const cplx> path) {
  return 2.0 * primitive(H, nu, z, path).real() + H.constants()[nu];
}

std::array<double, 2> harmonic_gradient(const HarmonicTuple& H, int nu, cplx z) {
  check_index(H, nu);
  const cplx g = H.frame_at(z).g[nu];
  return {2.0 * g.real(), -2.0 * g.imag()};
}

}  // namespace potlab
