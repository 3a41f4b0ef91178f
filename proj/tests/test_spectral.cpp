#include "bopp/ops.hpp"
#include "bopp/spectral.hpp"
#include "test_util.hpp"

using namespace bopp;
using namespace testutil;

namespace {

SymbolSpec sine_symbol() {
  return symbol_closed(2, [](const double* z) { return cplx(std::sin(z[0] * z[0] + z[1] * z[1])); }, "sin|z|^2");
}

// Generic radii plus r = sqrt(k pi), where sin|z|^2 and sin(4|z|^2) vanish.
const std::vector<double>& radii() {
  static const std::vector<double> r = [] {
    std::vector<double> v = {1.0, 2.0, 3.0, 4.5, 6.0, 8.0};
    for (int k = 1; k <= 12; ++k) v.push_back(std::sqrt(k * kPi));
    return v;
  }();
  return r;
}

}  // namespace

TEST_CASE("harmonic oscillator spectrum") {
  for (const GridSpec& g : {GridSpec::make(1, 64, 6.0), GridSpec::self_dual(1, 64)}) {
    const SpectralResult r = eigensolve(weyl_kernel(symbol_harmonic(1), g), 5);
    REQUIRE(r.eigenvalues.size() == 5);
    for (int k = 0; k < 5; ++k) {
      CHECK(r.eigenvalues[k] == doctest::Approx(k + 0.5).epsilon(0).scale(0).epsilon(1e-6));
      CHECK(r.residuals[k] <= 1e-8);
      // Hermite functions modulo phase.
      const SampledField hk = hermite_function(g, k);
      CHECK(rel_diff(fitted_phase(r.eigenfields[k], hk) * r.eigenfields[k], hk) <= 1e-5);
    }
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b)
        CHECK(std::abs(inner(r.eigenfields[a], r.eigenfields[b]) - (a == b ? 1.0 : 0.0)) <= 1e-8);
  }
}

TEST_CASE("constant shift moves the spectrum by one") {
  const GridSpec g = GridSpec::self_dual(1, 64);
  const SpectralResult r0 = eigensolve(weyl_kernel(symbol_harmonic(1), g), 6);
  const SpectralResult r1 = eigensolve(weyl_kernel(symbol_sum(symbol_harmonic(1), symbol_constant(2, 1.0)), g), 6);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(r1.eigenvalues[k] - r0.eigenvalues[k] - 1.0) <= 1e-8);
}

TEST_CASE("eigensolve rejects non-Hermitian matrices") {
  const GridSpec g = GridSpec::self_dual(1, 16);
  CMat M = CMat::Zero(16, 16);
  M(0, 1) = 1.0;
  CHECK(error_of([&] { eigensolve(make_operator(g, M)); }) == Errc::NotHermitian);
  const OperatorMatrix X = weyl_kernel(symbol_linear(2, 0), g);
  CHECK(error_of([&] { eigensolve(weyl_kernel(symbol_closed(2, [](const double* z) { return cplx(z[0], z[1]); }), g)); }) ==
        Errc::NotHermitian);
  CHECK(eigensolve(X).eigenvalues.size() == 16);
}

TEST_CASE("spectrum transfer to the phase-space operator") {
  for (double c : {1.0, 4.0}) {
    const TransferReport rep = spectrum_transfer_check(symbol_harmonic(1), build_form(c * standard_J(1)), 3);
    REQUIRE(rep.eigenvalues.size() == 3);
    // A^' has symbol a(f z) with f = sqrt(c) I, so lambda_k = c (k + 1/2).
    for (int k = 0; k < 3; ++k) CHECK(std::abs(rep.eigenvalues[k] - c * (k + 0.5)) <= 1e-4 * c);
    CHECK(rep.entries.size() == 9);
    CHECK(rep.max_residual <= 1e-4);
    // Each lambda_k is carried by every window; residuals at round-off level are compared above the floor.
    CHECK(rep.window_spread <= 10.0);
    MESSAGE("c = " << c << ": max residual " << rep.max_residual << ", raw window spread " << rep.raw_window_spread);
  }
}

TEST_CASE("constant symbol transfers exactly") {
  const TransferReport rep = spectrum_transfer_check(symbol_constant(2, 2.5), standard_form(1), 2, 32);
  for (double lam : rep.eigenvalues) CHECK(std::abs(lam - 2.5) <= 1e-10);
  CHECK(rep.max_residual <= 1e-10);
}

TEST_CASE("adjoint transfer: eigenvectors of A~ pulled back by W*") {
  const GridSpec g = GridSpec::self_dual(1, 64);
  const OperatorMatrix A = weyl_kernel(symbol_harmonic(1), g);
  const Window phi0 = Window::hermite(g, 0), phi1 = Window::hermite(g, 1);
  const SampledField h0 = hermite_function(g, 0), h1 = hermite_function(g, 1);

  const AdjointTransferReport r00 = adjoint_transfer_check(wavepacket(phi0, h0), phi0, A);
  CHECK(std::abs(r00.lambda - 0.5) <= 1e-4);
  CHECK(r00.residual <= 1e-4);
  CHECK(std::abs(r00.u_norm - 1.0) <= 1e-6);

  // The function index carries the eigenvalue: W_{phi0} h1 -> 1.5.
  const AdjointTransferReport r01 = adjoint_transfer_check(wavepacket(phi0, h1), phi0, A);
  CHECK(std::abs(r01.lambda - 1.5) <= 1e-4);
  CHECK(r01.residual <= 1e-4);

  // Phi_{1,0} = W_{phi1} h0 lies in H_{phi1}, which is orthogonal to H_{phi0}.
  CHECK(error_of([&] { adjoint_transfer_check(wavepacket(phi1, h0), phi0, A); }) == Errc::DegenerateProjection);

  std::mt19937_64 rng(21);
  const SampledField U = random_field(phase_space_grid(g), rng);
  const SampledField perp = U - projector(phi0, U);
  CHECK(error_of([&] { adjoint_transfer_check(perp, phi0, A); }) == Errc::DegenerateProjection);
}

TEST_CASE("Shubin diagnostic") {
  const ShubinParams p;
  const ShubinReport h = shubin_diagnostic(symbol_harmonic(1), p, radii());
  CHECK(h.consistent);
  CHECK(h.C0 > 0.0);
  CHECK(h.C0 <= h.C1);
  CHECK(h.C_alpha.size() == 2);

  QuadraticData q;
  q.b = RVec::Zero(2);
  q.Q = RMat(2, 2);
  q.Q << 2.0, 0.5, 0.5, 1.0;
  const ShubinReport m = shubin_diagnostic(symbol_quadratic(q), p, radii());
  CHECK(m.consistent);

  const ShubinReport s = shubin_diagnostic(sine_symbol(), p, radii());
  CHECK_FALSE(s.consistent);
  MESSAGE("sine: " << s.note);
}

TEST_CASE("Shubin class under linear changes of variables") {
  const ShubinParams p;
  RMat two = 2.0 * RMat::Identity(2, 2);
  const ClassInvarianceReport d = symbol_class_invariance_check(symbol_harmonic(1), p, two, radii());
  CHECK(d.original.consistent);
  CHECK(d.composed.consistent);
  CHECK(d.agree);

  const ClassInvarianceReport r = symbol_class_invariance_check(symbol_harmonic(1), p, rotation2(0.7), radii());
  CHECK(r.composed.consistent);
  CHECK(r.agree);

  const ClassInvarianceReport s = symbol_class_invariance_check(sine_symbol(), p, two, radii());
  CHECK_FALSE(s.original.consistent);
  CHECK_FALSE(s.composed.consistent);
  CHECK(s.agree);
}
