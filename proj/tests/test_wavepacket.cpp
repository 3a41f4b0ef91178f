#include "bopp/ops.hpp"
#include "bopp/wavepacket.hpp"
#include "test_util.hpp"

using namespace bopp;
using namespace testutil;

namespace {

// The xi lattice has step pi / L, so y-correlations longer than 2L alias; the
// self-dual box (L ~ 10) keeps random bumps clear of that.
const GridSpec& box() {
  static const GridSpec g = GridSpec::self_dual(1, 64);
  return g;
}

SampledField bump(const GridSpec& g, double c, double k, double w) {
  return SampledField::sample(g, [=](const double* x) {
    return std::exp(cplx(-(x[0] - c) * (x[0] - c) / (2 * w * w), k * x[0]));
  });
}

// Phase-space field sampled from a closed form in (x, xi).
SampledField on_phase(const GridSpec& P, const std::function<cplx(double, double)>& fn) {
  return SampledField::sample(P, [&](const double* z) { return fn(z[0], z[1]); });
}

double gram_defect(const std::vector<SampledField>& Phi) {
  double worst = 0.0;
  for (std::size_t a = 0; a < Phi.size(); ++a)
    for (std::size_t b = 0; b < Phi.size(); ++b)
      worst = std::max(worst, std::abs(inner(Phi[a], Phi[b]) - (a == b ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

TEST_CASE("cross-Wigner of the ground state") {
  const SampledField phi0 = hermite_function(box(), 0);
  const SampledField W = cross_wigner(phi0, phi0);
  const SampledField oracle = on_phase(W.grid, [](double x, double xi) { return std::exp(-x * x - xi * xi) / kPi; });
  CHECK(max_abs(W - oracle) <= 1e-6);

  // Same on the L = 6 box.
  const SampledField p6 = hermite_function(GridSpec::make(1, 64, 6.0), 0);
  const SampledField W6 = cross_wigner(p6, p6);
  CHECK(max_abs(W6 - on_phase(W6.grid, [](double x, double xi) { return std::exp(-x * x - xi * xi) / kPi; })) <= 1e-6);
  CHECK(error_of([&] { cross_wigner(phi0, hermite_function(GridSpec::make(1, 32, 6.0), 0)); }) ==
        Errc::GridMismatch);
}

TEST_CASE("cross-Wigner marginal and Moyal identity") {
  const GridSpec& g = box();
  const SampledField u = bump(g, 0.4, 0.8, 0.9);
  const SampledField W = cross_wigner(u, u);
  const GridSpec& P = W.grid;
  const double hxi = P.spacing(1);
  double worst = 0.0;
  for (int i = 0; i < P.points; ++i) {
    cplx s = 0.0;
    for (int j = 0; j < P.points; ++j) s += W[static_cast<std::size_t>(i) * P.points + j];
    worst = std::max(worst, std::abs(s * hxi - std::norm(u[i])));
  }
  CHECK(worst <= 1e-6);

  std::mt19937_64 rng(11);
  const SampledField a = random_field(g, rng), b = random_field(g, rng), c = random_field(g, rng),
                     d = random_field(g, rng);
  const cplx lhs = inner(cross_wigner(a, b), cross_wigner(c, d));
  const cplx rhs = inner(a, c) * std::conj(inner(b, d)) / (2 * kPi);
  CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(rhs));
}

TEST_CASE("translation covariance of the cross-Wigner transform") {
  const GridSpec& g = box();
  std::mt19937_64 rng(12);
  const SampledField u = random_field(g, rng), v = random_field(g, rng);
  const SampledField W = cross_wigner(u, v);
  const double h = g.spacing(0), k = W.grid.spacing(1);

  // One-sided: W(T(z0) u, v)(z) = e^{-i sigma(z, z0)} W(u, v)(z - z0/2).
  {
    const double x0 = 4 * h, xi0 = 6 * k;
    const SampledField lhs = cross_wigner(heisenberg_weyl(vec({x0, xi0}), u), v);
    const SampledField moved = shift_field(W, {x0 / 2, xi0 / 2});
    const SampledField phase = on_phase(W.grid, [&](double x, double xi) { return std::exp(cplx(0, xi0 * x - xi * x0)); });
    SampledField rhs = moved;
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] *= phase[i];
    CHECK(rel_max(lhs, rhs) <= 1e-6);
  }
  // Two-sided, shifting by the midpoint of z0 and z1.
  {
    const double x0 = 4 * h, xi0 = 6 * k, x1 = -2 * h, xi1 = -2 * k;
    const SampledField lhs = cross_wigner(heisenberg_weyl(vec({x0, xi0}), u), heisenberg_weyl(vec({x1, xi1}), v));
    const SampledField moved = shift_field(W, {(x0 + x1) / 2, (xi0 + xi1) / 2});
    const SampledField phase = on_phase(W.grid, [&](double x, double xi) {
      return std::exp(cplx(0, (xi0 - xi1) * x - xi * (x0 - x1) + 0.5 * (xi1 * x0 - xi0 * x1)));
    });
    SampledField rhs = moved;
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] *= phase[i];
    CHECK(rel_max(lhs, rhs) <= 1e-6);
  }
}

TEST_CASE("wavepacket transform: isometry and Gaussian image") {
  const GridSpec& g = box();
  const Window phi = Window::hermite(g, 0);
  CHECK(std::abs(phi.field.norm() - 1.0) <= 1e-10);
  const SampledField W0 = wavepacket(phi, hermite_function(g, 0));
  const SampledField oracle =
      on_phase(W0.grid, [](double x, double xi) { return std::sqrt(2 * kPi) / kPi * std::exp(-x * x - xi * xi); });
  CHECK(max_abs(W0 - oracle) <= 1e-6);

  std::mt19937_64 rng(13);
  for (int r = 0; r < 3; ++r) {
    const SampledField u = random_field(g, rng);
    CHECK(std::abs(wavepacket(phi, u).norm() - u.norm()) <= 1e-6 * u.norm());
  }
  const Window phi2 = Window::hermite(g, 2, 1.3);
  const SampledField u = bump(g, -0.5, 1.1, 0.8);
  CHECK(std::abs(wavepacket(phi2, u).norm() - u.norm()) <= 1e-6 * u.norm());
}

TEST_CASE("wavepacket adjoint, projector and inverse") {
  const GridSpec& g = box();
  const Window phi = Window::hermite(g, 1);
  std::mt19937_64 rng(14);
  const SampledField u = random_field(g, rng);
  const SampledField Wu = wavepacket(phi, u);
  const SampledField U = random_field(Wu.grid, rng), V = random_field(Wu.grid, rng);

  // (W u | U) = (u | W* U)
  const cplx l = inner(Wu, U), r = inner(u, wavepacket_adjoint(phi, U));
  CHECK(std::abs(l - r) <= 1e-6 * u.norm() * U.norm());

  CHECK(rel_diff(wavepacket_adjoint(phi, Wu), u) <= 1e-6);

  const SampledField PU = projector(phi, U);
  CHECK(norm(projector(phi, PU) - PU) <= 1e-6 * U.norm());
  CHECK(std::abs(inner(PU, V) - inner(U, projector(phi, V))) <= 1e-6 * U.norm() * V.norm());
  CHECK(rel_diff(projector(phi, Wu), Wu) <= 1e-6);

  // A field orthogonal to the range is annihilated by the adjoint.
  const SampledField perp = U - PU;
  CHECK(perp.norm() >= 0.5 * U.norm());
  CHECK(wavepacket_adjoint(phi, perp).norm() <= 1e-6 * U.norm());

  CHECK(rel_diff(wavepacket_inverse(phi, Wu), u) <= 1e-6);
  for (int k = 0; k < 3; ++k) {
    const SampledField hk = hermite_function(g, k);
    CHECK(rel_diff(wavepacket_inverse(phi, wavepacket(phi, hk)), hk) <= 1e-6);
  }
  // e^{-|z|^2/2} is not W_phi of anything.
  const SampledField G = gaussian(Wu.grid);
  CHECK(error_of([&] { wavepacket_inverse(phi, G); }) == Errc::NotInRange);
}

TEST_CASE("deformed wavepacket transform W_{f,phi}") {
  const GridSpec g = GridSpec::self_dual(1, 64);
  const Window phi = Window::hermite(g, 0);
  std::mt19937_64 rng(15);
  const SampledField u = random_field(g, rng);

  const SymplecticForm J = standard_form(1);
  const SampledField Wf = wavepacket_f(darboux_factor(J), phi, u);
  CHECK(max_abs(Wf - wavepacket(phi, u)) <= 1e-12);

  const SymplecticForm form = build_form(4.0 * standard_J(1));
  const DarbouxFactor fac = darboux_factor(form);
  const GridSpec Gw = adapted_grid(form, 64);
  const SampledField W4 = wavepacket_f(fac, phi, u, &Gw);
  CHECK(std::abs(W4.norm() - u.norm()) <= 1e-6 * u.norm());
  CHECK(rel_diff(wavepacket_f_adjoint(fac, phi, W4, g), u) <= 1e-6);
}

TEST_CASE("change of Darboux factor by a rotation") {
  // W_{f',phi} u = W_{f, S phi}(S u) with f = I and f' = S a rotation; S acts by fractional Fourier.
  const GridSpec g = GridSpec::self_dual(1, 64);
  const SampledField u = bump(g, 0.3, 0.5, 0.9);
  const Window phi = Window::hermite(g, 0, 1.2);
  const std::vector<MetaplecticGenerator> S = {MetaplecticGenerator::fractional_fourier(0.6)};
  const RMat R = metaplectic_projection(S, 1);
  const SymplecticForm J = standard_form(1);
  const SampledField lhs = wavepacket_f(darboux_from_matrix(J, R), phi, u);
  const SampledField rhs =
      wavepacket(Window::from_field(metaplectic_apply(S, phi.field)), metaplectic_apply(S, u));
  REQUIRE(lhs.grid.matches(rhs.grid));
  CHECK(rel_diff(fitted_phase(rhs, lhs) * rhs, lhs) <= 1e-5);
}

TEST_CASE("Hermite wavepacket bases") {
  const GridSpec g = GridSpec::self_dual(1, 64);
  const SymplecticForm J = standard_form(1);
  const DarbouxFactor I = darboux_factor(J);
  const auto Phi = basis_generate(I, g, {0, 1, 2}, {0, 1, 2});
  REQUIRE(Phi.size() == 9);
  CHECK(gram_defect(Phi) <= 1e-6);
  const SampledField oracle =
      on_phase(Phi[0].grid, [](double x, double xi) { return std::sqrt(2 * kPi) / kPi * std::exp(-x * x - xi * xi); });
  CHECK(max_abs(Phi[0] - oracle) <= 1e-6);

  const DarbouxFactor f4 = darboux_factor(build_form(4.0 * standard_J(1)));
  CHECK(gram_defect(basis_generate(f4, g, {0, 1, 2}, {0, 1, 2})) <= 1e-6);

  // Windows and functions from Hermite families of different widths.
  std::vector<Window> windows;
  std::vector<SampledField> functions;
  for (int k = 0; k < 3; ++k) {
    windows.push_back(Window::hermite(g, k));
    functions.push_back(hermite_function(g, k, 1.4));
  }
  CHECK(gram_defect(basis_generate(I, windows, functions)) <= 1e-6);

  CHECK(error_of([&] { basis_generate(I, g, {0, 6}, {0}); }) == Errc::IndexCap);
  CHECK(error_of([&] { basis_generate(I, g, {0}, {3}, 1.0, 2); }) == Errc::IndexCap);
}
