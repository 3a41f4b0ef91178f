#include "bopp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

namespace bopp {

SpectralResult eigensolve(const OperatorMatrix& A, int count) {
  if (!A.hermitian_flag) fail(Errc::NotHermitian, "eigensolve needs a Hermitian operator");
  const CMat H = 0.5 * (A.entries + A.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  if (es.info() != Eigen::Success) fail(Errc::FactorizationFailed, "Hermitian eigensolver did not converge");
  const int total = static_cast<int>(H.rows());
  const int m = count < 0 ? total : std::min(count, total);
  SpectralResult r;
  const double s = 1.0 / std::sqrt(A.grid.cell());
  for (int i = 0; i < m; ++i) {
    const double lam = es.eigenvalues()(i);
    const CVec v = es.eigenvectors().col(i);
    SampledField f(A.grid);
    for (int p = 0; p < total; ++p) f.values[p] = s * v(p);
    const double res = (A.entries * v - lam * v).norm() / v.norm();
    r.eigenvalues.push_back(lam);
    r.eigenfields.push_back(std::move(f));
    r.residuals.push_back(res);
  }
  return r;
}

TransferReport spectrum_transfer_check(const SymbolSpec& a, const SymplecticForm& form, int count, int points,
                                       const PhaseOptions& opt) {
  if (count < 1) fail(Errc::InvalidArgument, "count must be positive");
  const int n = form.n;
  const DarbouxFactor fac = darboux_factor(form);
  const GridSpec g = GridSpec::self_dual(n, points);
  const OperatorMatrix Ahat = weyl_kernel(compose_linear(a, fac.f), g);
  const SpectralResult sp = eigensolve(Ahat, count);
  const GridSpec Gw = adapted_grid(form, points);
  const OperatorMatrix At = phase_weyl_matrix(a, form, Gw, opt);
  TransferReport rep;
  rep.eigenvalues = sp.eigenvalues;
  std::vector<Window> windows;
  for (const auto& f : sp.eigenfields) windows.push_back(Window::from_field(f));
  std::vector<std::vector<double>> by_function(count), raw(count);
  for (int j = 0; j < count; ++j)
    for (int k = 0; k < count; ++k) {
      const SampledField Phi = wavepacket_f(fac, windows[j], sp.eigenfields[k], &Gw);
      const double lam = sp.eigenvalues[k];
      const double res = norm(At.apply(Phi) - cplx(lam) * Phi) / Phi.norm();
      rep.entries.push_back({j, k, lam, res});
      rep.max_residual = std::max(rep.max_residual, res);
      by_function[k].push_back(std::max(res, kSpreadFloor));
      raw[k].push_back(res);
    }
  auto spread = [](const std::vector<std::vector<double>>& groups) {
    double s = 1.0;
    for (const auto& v : groups) {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      s = std::max(s, *hi / *lo);
    }
    return s;
  };
  rep.window_spread = spread(by_function);
  rep.raw_window_spread = spread(raw);
  return rep;
}

AdjointTransferReport adjoint_transfer_check(const SampledField& U, const Window& phi, const OperatorMatrix& Ahat,
                                             double degenerate_tol) {
  const SampledField u = wavepacket_adjoint(phi, U);
  AdjointTransferReport rep;
  rep.u_norm = u.norm();
  const double un = U.norm();
  if (!(rep.u_norm > degenerate_tol * un))
    fail(Errc::DegenerateProjection, "W_phi^* U vanishes: U is orthogonal to the range of W_phi");
  const SampledField Au = Ahat.apply(u);
  rep.lambda = (inner(Au, u) / inner(u, u)).real();
  rep.residual = norm(Au - cplx(rep.lambda) * u) / rep.u_norm;
  return rep;
}

namespace {

// Multi-indices of the given order as sorted axis lists.
void multi_indices(int d, int order, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == order) {
    out.push_back(cur);
    return;
  }
  for (int a = start; a < d; ++a) {
    cur.push_back(a);
    multi_indices(d, order, a, cur, out);
    cur.pop_back();
  }
}

// Nested central differences along the listed axes.
cplx derivative(const SymbolSpec& a, const RVec& z, const std::vector<int>& axes, double delta) {
  const int ord = static_cast<int>(axes.size());
  cplx s = 0.0;
  RVec w(z.size());
  for (int mask = 0; mask < (1 << ord); ++mask) {
    w = z;
    double sign = 1.0;
    for (int i = 0; i < ord; ++i) {
      const double si = (mask >> i & 1) ? -1.0 : 1.0;
      w(axes[i]) += si * delta;
      sign *= si;
    }
    s += sign * a(w.data());
  }
  return s / std::pow(2.0 * delta, ord);
}

std::vector<RVec> sphere_directions(int d) {
  std::vector<RVec> dirs;
  if (d == 2) {
    for (int i = 0; i < 64; ++i) {
      RVec v(2);
      v << std::cos(2.0 * kPi * i / 64), std::sin(2.0 * kPi * i / 64);
      dirs.push_back(v);
    }
    return dirs;
  }
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 256; ++i) {
    RVec v(d);
    for (int a = 0; a < d; ++a) v(a) = nd(rng);
    dirs.push_back(v.normalized());
  }
  return dirs;
}

}  // namespace

ShubinReport shubin_diagnostic(const SymbolSpec& a, const ShubinParams& p, const std::vector<double>& radii) {
  if (p.m0 > p.m1) fail(Errc::InvalidArgument, "Shubin parameters need m0 <= m1");
  if (!(p.rho > 0.0 && p.rho <= 1.0)) fail(Errc::InvalidArgument, "rho must lie in (0, 1]");
  const int d = a.domain_dim;
  const auto dirs = sphere_directions(d);
  std::vector<std::vector<std::vector<int>>> alphas(p.max_order + 1);
  for (int o = 1; o <= p.max_order; ++o) {
    std::vector<int> cur;
    multi_indices(d, o, 0, cur, alphas[o]);
  }
  ShubinReport rep;
  rep.C_alpha.assign(p.max_order, 0.0);
  rep.C0 = std::numeric_limits<double>::infinity();
  const double eps = std::numeric_limits<double>::epsilon();
  for (double r : radii) {
    if (r < p.R) continue;
    rep.radii.push_back(r);
    double lo = std::numeric_limits<double>::infinity();
    for (const RVec& u : dirs) {
      const RVec z = r * u;
      const double av = std::abs(a(z.data()));
      lo = std::min(lo, av / std::pow(r, p.m0));
      rep.C1 = std::max(rep.C1, av / std::pow(r, p.m1));
      for (int o = 1; o <= p.max_order; ++o) {
        const double delta = std::pow(eps, 1.0 / (o + 2)) * std::max(1.0, r);
        for (const auto& al : alphas[o]) {
          const double dv = std::abs(derivative(a, z, al, delta));
          const double ratio = av > 0.0 ? dv * std::pow(r, p.rho * o) / av : std::numeric_limits<double>::infinity();
          rep.C_alpha[o - 1] = std::max(rep.C_alpha[o - 1], ratio);
        }
      }
    }
    rep.lower.push_back(lo);
    rep.C0 = std::min(rep.C0, lo);
  }
  if (rep.radii.empty()) fail(Errc::InvalidArgument, "no sample radius is >= R");
  bool ok = rep.C0 > 1e-8 * rep.C1;
  for (double c : rep.C_alpha) ok = ok && std::isfinite(c) && c < 1e8;
  rep.consistent = ok;
  rep.note = ok ? "bounds hold on the sampled spheres (heuristic)"
                : "a sampled bound failed: lower constant vanishes or a derivative ratio is unbounded";
  return rep;
}

ClassInvarianceReport symbol_class_invariance_check(const SymbolSpec& a, const ShubinParams& p, const RMat& f,
                                                    const std::vector<double>& radii) {
  if (!(p.m0 > 0.0)) fail(Errc::InvalidArgument, "class invariance check needs m0 > 0");
  if (std::abs(f.determinant()) < 1e-14) fail(Errc::Singular, "f must be invertible");
  ClassInvarianceReport rep;
  rep.original = shubin_diagnostic(a, p, radii);
  rep.composed = shubin_diagnostic(compose_linear(a, f), p, radii);
  rep.agree = rep.original.consistent == rep.composed.consistent;
  return rep;
}

}  // namespace bopp
