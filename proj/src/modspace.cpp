#include "bopp/modspace.hpp"

#include <algorithm>
#include <cmath>

namespace bopp {

double weight_vs(const double* z, int dim, double s) {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += z[a] * z[a];
  return std::pow(1.0 + r2, 0.5 * s);
}

double lq_norm(const SampledField& U, double s, double q) {
  if (!(q >= 1.0)) fail(Errc::InvalidArgument, "q must be >= 1");
  if (!(s >= 0.0)) fail(Errc::InvalidArgument, "s must be >= 0");
  const GridSpec& g = U.grid;
  std::vector<double> z(g.dim);
  const bool sup = std::isinf(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < U.size(); ++i) {
    g.point(i, z.data());
    const double v = std::abs(U[i]) * weight_vs(z.data(), g.dim, s);
    if (sup)
      acc = std::max(acc, v);
    else
      acc += std::pow(v, q);
  }
  return sup ? acc : std::pow(acc * g.cell(), 1.0 / q);
}

double mod_norm(const SampledField& u, const ModNormParams& p) {
  return lq_norm(wavepacket(p.window, u), p.s, p.q);
}

EquivalenceReport window_equivalence(const std::vector<SampledField>& testset, const Window& phi1, const Window& phi2,
                                     double s, double q) {
  EquivalenceReport rep;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& u : testset) {
    const double r = mod_norm(u, {s, q, phi1}) / mod_norm(u, {s, q, phi2});
    rep.ratios.push_back(r);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (!rep.ratios.empty()) rep.C = std::max(hi, 1.0 / lo);
  return rep;
}

double sjostrand_norm(const SymbolSpec& a, const Window& Phi, double s) {
  const GridSpec& g = Phi.field.grid;
  if (g.dim != 2) fail(Errc::DimensionMismatch, "the symbol norm is implemented for symbols on R^2");
  if (a.domain_dim != 2) fail(Errc::DimensionMismatch, "symbol must live on R^2");
  if (g.points > kSjostrandMaxPoints)
    fail(Errc::GridCapExceeded, "R^4 sup-integral is capped at " + std::to_string(kSjostrandMaxPoints) + " points per axis");
  const SampledField W = cross_wigner(sample_symbol(a, g), Phi.field);
  const std::size_t slab = g.total();  // zeta points per z point
  std::vector<double> sup(slab, 0.0);
  std::vector<double> z(2);
  for (std::size_t iz = 0; iz < slab; ++iz) {
    g.point(iz, z.data());
    const double w = weight_vs(z.data(), 2, s);
    for (std::size_t k = 0; k < slab; ++k) sup[k] = std::max(sup[k], std::abs(W[iz * slab + k]) * w);
  }
  double acc = 0.0;
  for (double v : sup) acc += v;
  return acc * g.dual().cell();
}

SjostrandInvarianceReport sjostrand_invariance_check(const SymbolSpec& a, const RMat& f, const Window& Phi, double s) {
  if (f.rows() != 2 || f.cols() != 2) fail(Errc::DimensionMismatch, "f must be 2x2");
  if (std::abs(f.determinant()) < 1e-14) fail(Errc::Singular, "f must be invertible");
  SjostrandInvarianceReport rep;
  rep.lhs = sjostrand_norm(compose_linear(a, f), Phi, s);
  ResampleOptions ro;
  ro.verify = false;
  const Window moved = Window::from_field(linear_substitution(Phi.field, f.inverse(), 1.0, Phi.field.grid, ro), false);
  rep.rhs = sjostrand_norm(a, moved, s);
  rep.ratio = rep.lhs / rep.rhs;
  const double fn = f.jacobiSvd().singularValues()(0);
  rep.weight_constant = std::pow(1.0 + fn * fn, 0.5 * s);
  rep.finite_together = std::isfinite(rep.lhs) && std::isfinite(rep.rhs) && rep.lhs > 0.0 && rep.rhs > 0.0;
  return rep;
}

MembershipReport range_membership(const SampledField& U, const DarbouxFactor& factor, const ModNormParams& p,
                                  const GridSpec& function_grid, double tol) {
  MembershipReport rep;
  rep.pulled = wavepacket_f_adjoint(factor, p.window, U, function_grid);
  const SampledField PU = wavepacket_f(factor, p.window, rep.pulled, &U.grid);
  rep.residual = rel_diff(PU, U);
  rep.pulled_norm = mod_norm(rep.pulled, p);
  rep.member = rep.residual <= tol && std::isfinite(rep.pulled_norm);
  return rep;
}

PropregReport propreg_check(const SymbolSpec& a, const SymplecticForm& form, const DarbouxFactor& factor,
                            const ModNormParams& p, const std::vector<SampledField>& testset,
                            const GridSpec& function_grid, const PhaseOptions& opt) {
  if (testset.empty()) fail(Errc::InvalidArgument, "empty test set");
  const OperatorMatrix A = phase_weyl_matrix(a, form, testset.front().grid, opt);
  PropregReport rep;
  rep.membership_preserved = true;
  for (const auto& U : testset) {
    const MembershipReport in = range_membership(U, factor, p, function_grid);
    const MembershipReport out = range_membership(A.apply(U), factor, p, function_grid);
    const double r = out.pulled_norm / in.pulled_norm;
    rep.ratios.push_back(r);
    rep.max_ratio = std::max(rep.max_ratio, r);
    rep.max_residual = std::max(rep.max_residual, out.residual);
    rep.membership_preserved = rep.membership_preserved && in.member && out.member;
  }
  return rep;
}

const char* verdict_name(Verdict v) { return v == Verdict::Violates ? "VIOLATES" : "CONSISTENT"; }

ConcentrationReport concentration_certificate(const SampledField& U, const WignerEllipsoid& M) {
  const GridSpec& g = U.grid;
  if (M.M.rows() != g.dim) fail(Errc::DimensionMismatch, "ellipsoid and field dimensions differ");
  ConcentrationReport rep;
  rep.capacity = symplectic_capacity(M);
  RVec z(g.dim);
  double umax = 0.0;
  for (const auto& v : U.values) umax = std::max(umax, std::abs(v));
  auto region = [&](double frac) {
    for (int a = 0; a < g.dim; ++a)
      if (std::abs(z(a)) > frac * g.halfwidth[a]) return false;
    return true;
  };
  for (std::size_t i = 0; i < U.size(); ++i) {
    g.point(i, z.data());
    // Samples at the roundoff floor carry no envelope information.
    if (!region(0.5) || std::abs(U[i]) <= 1e-12 * umax) continue;
    rep.C = std::max(rep.C, std::abs(U[i]) / std::exp(-z.dot(M.M * z)));
  }
  for (std::size_t i = 0; i < U.size(); ++i) {
    g.point(i, z.data());
    if (region(0.5) || !region(0.9)) continue;
    const double env = rep.C * std::exp(-z.dot(M.M * z));
    if (std::abs(U[i]) > env * (1.0 + 1e-6) + 1e-12 * umax)
      fail(Errc::BoundNotSatisfied, "sub-Gaussian envelope fitted on the central half box fails further out");
  }
  rep.verdict = rep.capacity < kPi * (1.0 - 1e-12) ? Verdict::Violates : Verdict::Consistent;
  return rep;
}

WeightReport weight_inequality_check(const RMat& f, double s, const GridSpec& g) {
  if (f.rows() != g.dim || f.cols() != g.dim) fail(Errc::DimensionMismatch, "f and grid dimensions differ");
  WeightReport rep;
  const double fn = f.jacobiSvd().singularValues()(0);
  rep.bound = std::pow(1.0 + fn * fn, 0.5 * s);
  RVec z(g.dim);
  for (std::size_t i = 0; i < g.total(); ++i) {
    g.point(i, z.data());
    const RVec fz = f * z;
    rep.max_ratio = std::max(rep.max_ratio, weight_vs(fz.data(), g.dim, s) / weight_vs(z.data(), g.dim, s));
  }
  rep.holds = rep.max_ratio <= rep.bound * (1.0 + 1e-12);
  return rep;
}

}  // namespace bopp
