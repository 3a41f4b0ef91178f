#include "bopp/ops.hpp"
#include "bopp/wavepacket.hpp"
#include "test_util.hpp"

using namespace bopp;
using namespace testutil;

namespace {

const GridSpec& line() {
  static const GridSpec g = GridSpec::self_dual(1, 64);
  return g;
}

// Gaussian of width w centred at c, evaluated anywhere.
cplx bump(double x, double c = 0.3, double w = 0.9) { return std::exp(-(x - c) * (x - c) / (2 * w * w)); }

SampledField bump_field(const GridSpec& g) {
  return SampledField::sample(g, [](const double* x) { return bump(x[0]) * std::exp(cplx(0, 0.4 * x[0])); });
}

}  // namespace

TEST_CASE("Heisenberg-Weyl operators") {
  const GridSpec& g = line();
  const double h = g.spacing(0);
  const SampledField u = bump_field(g);
  CHECK(max_abs(heisenberg_weyl(vec({0, 0}), u) - u) == 0.0);

  const RVec z0 = vec({3 * h, 0.7}), z1 = vec({-5 * h, -1.1});
  const SampledField Tu = heisenberg_weyl(z0, u);
  CHECK(std::abs(Tu.norm() - u.norm()) <= 1e-10 * u.norm());

  // Closed form at an on-lattice x0.
  const SampledField oracle = SampledField::sample(g, [&](const double* x) {
    return std::exp(cplx(0, z0(1) * x[0] - z0(1) * z0(0) / 2)) * bump(x[0] - z0(0)) *
           std::exp(cplx(0, 0.4 * (x[0] - z0(0))));
  });
  CHECK(max_abs(Tu - oracle) <= 1e-12);

  // T(z0) T(z1) = e^{i sigma(z0, z1)} T(z1) T(z0).
  const SampledField lhs = heisenberg_weyl(z0, heisenberg_weyl(z1, u));
  const SampledField rhs = std::exp(cplx(0, sigma_eval(z0, z1))) * heisenberg_weyl(z1, heisenberg_weyl(z0, u));
  CHECK(rel_max(lhs, rhs) <= 1e-8);

  CHECK(error_of([&] { heisenberg_weyl(vec({1.0}), u); }) == Errc::DimensionMismatch);
}

TEST_CASE("Heisenberg-Weyl flow: T(t z0) u0 = u(., t)") {
  const GridSpec& g = line();
  const double h = g.spacing(0);
  const RVec z0 = vec({4 * h, 0.8});
  const SampledField u0 = bump_field(g);
  auto flow = [&](double t) {
    return SampledField::sample(g, [&](const double* x) {
      const double xs = x[0] - t * z0(0);
      return std::exp(cplx(0, t * z0(1) * x[0] - 0.5 * t * t * z0(1) * z0(0))) * bump(xs) *
             std::exp(cplx(0, 0.4 * xs));
    });
  };
  for (double t : {0.0, 0.5, 1.0}) CHECK(max_abs(heisenberg_weyl(t * z0, u0) - flow(t)) <= 1e-8);

  // i du/dt = sigma(Z, z0) u = (x0 . D - xi0 . x) u with D = -i d/dx.
  const double t = 0.5, dt = 1e-3;
  const SampledField dudt =
      cplx(1.0 / (2 * dt)) * (heisenberg_weyl((t + dt) * z0, u0) - heisenberg_weyl((t - dt) * z0, u0));
  const SampledField ut = heisenberg_weyl(t * z0, u0);
  SampledField Fu = fourier(ut, -1);
  for (std::size_t k = 0; k < Fu.size(); ++k) Fu[k] *= Fu.grid.coord(0, static_cast<long>(k));
  const SampledField Du = fourier(Fu, 1);
  SampledField H(g);
  for (std::size_t k = 0; k < H.size(); ++k) H[k] = z0(0) * Du[k] - z0(1) * g.coord(0, static_cast<long>(k)) * ut[k];
  CHECK(rel_max(cplx(0, 1) * dudt, H) <= 1e-5);
}

TEST_CASE("Grossmann-Royer reflections") {
  const GridSpec& g = line();
  const double h = g.spacing(0);
  const SampledField even = gaussian(g);
  CHECK(max_abs(grossmann_royer(vec({0, 0}), even) - even) <= 1e-15);

  const SampledField u = bump_field(g);
  const RVec z0 = vec({1.5 * h, 0.6});
  CHECK(rel_max(grossmann_royer(z0, grossmann_royer(z0, u)), u) <= 1e-12);

  // e^{2i xi0 (x - x0)} u(2 x0 - x)
  const SampledField oracle = SampledField::sample(g, [&](const double* x) {
    const double r = 2 * z0(0) - x[0];
    return std::exp(cplx(0, 2 * z0(1) * (x[0] - z0(0)))) * bump(r) * std::exp(cplx(0, 0.4 * r));
  });
  CHECK(max_abs(grossmann_royer(z0, u) - oracle) <= 1e-12);

  CHECK(error_of([&] { grossmann_royer(vec({0.3 * h, 0.0}), u); }) == Errc::OffLatticeReflection);
}

TEST_CASE("Grossmann-Royer form of the wavepacket transform") {
  // W_phi u(z) = (2/pi)^{n/2} (T_GR(z) u | phi) at lattice points z.
  const GridSpec& g = line();
  const Window phi = Window::hermite(g, 1);
  const SampledField u = bump_field(g);
  const SampledField W = wavepacket(phi, u);
  const GridSpec& P = W.grid;
  double worst = 0.0;
  for (long i = 20; i < 44; i += 3)
    for (long j = 22; j < 42; j += 5) {
      const RVec z = vec({P.coord(0, i), P.coord(1, j)});
      const cplx gr = std::sqrt(2.0 / kPi) * inner(grossmann_royer(z, u), phi.field);
      worst = std::max(worst, std::abs(gr - W[static_cast<std::size_t>(i) * P.points + j]));
    }
  CHECK(worst <= 1e-8);
}

TEST_CASE("deformed translations T_omega") {
  const SymplecticForm form = build_form(4.0 * standard_J(1));
  const GridSpec G = adapted_grid(form, 64);
  const double h = G.spacing(0);
  std::mt19937_64 rng(3);
  const SampledField U = random_field(G, rng);
  CHECK(max_abs(phase_translate_omega(vec({0, 0}), U, form) - U) == 0.0);

  const RVec z0 = vec({2 * h, -4 * h}), z1 = vec({-6 * h, 2 * h});
  // (tom1): T(z0 + z1) = e^{-i omega(z0, z1)/2} T(z0) T(z1)
  const SampledField a = phase_translate_omega(z0 + z1, U, form);
  const SampledField b = std::exp(cplx(0, -omega_eval(form, z0, z1) / 2)) *
                         phase_translate_omega(z0, phase_translate_omega(z1, U, form), form);
  CHECK(rel_max(b, a) <= 1e-8);
  // (tom2): T(z0) T(z1) = e^{i omega(z0, z1)} T(z1) T(z0)
  const SampledField c = phase_translate_omega(z0, phase_translate_omega(z1, U, form), form);
  const SampledField d = std::exp(cplx(0, omega_eval(form, z0, z1))) *
                         phase_translate_omega(z1, phase_translate_omega(z0, U, form), form);
  CHECK(rel_max(c, d) <= 1e-8);

  // Closed form: e^{-i omega(z, z0)} U(z - z0/2) on a Gaussian.
  const SampledField Gs = gaussian(G, 1.3);
  const SampledField oracle = SampledField::sample(G, [&](const double* z) {
    const RVec zz = vec({z[0], z[1]});
    const RVec s = zz - z0 / 2;
    return std::exp(cplx(0, -omega_eval(form, zz, z0))) * std::exp(-s.squaredNorm() / (2 * 1.3 * 1.3));
  });
  CHECK(max_abs(phase_translate_omega(z0, Gs, form) - oracle) <= 1e-12);
}

TEST_CASE("intertwining W_phi T(z0) = T_sigma(z0) W_phi") {
  const GridSpec& g = line();
  const double h = g.spacing(0);
  const Window phi = Window::hermite(g, 0);
  const SampledField u = bump_field(g);
  const SymplecticForm J = standard_form(1);
  for (const RVec& z0 : {vec({2 * h, 4 * h}), vec({-4 * h, 2 * h}), vec({6 * h, -8 * h})}) {
    const SampledField lhs = wavepacket(phi, heisenberg_weyl(z0, u));
    const SampledField rhs = phase_translate_omega(z0, wavepacket(phi, u), J);
    CHECK(rel_max(lhs, rhs) <= 1e-8);
  }
}

TEST_CASE("metaplectic generators") {
  const GridSpec& g = line();
  std::mt19937_64 rng(4);
  const SampledField u = random_field(g, rng);
  CHECK(max_abs(metaplectic_apply({}, u) - u) == 0.0);

  // A quarter turn is the Fourier transform up to a global phase.
  const SampledField F = metaplectic_apply({MetaplecticGenerator::fractional_fourier(kPi / 2)}, u);
  const SampledField Fu = fourier(u, -1);
  CHECK(rel_diff(fitted_phase(F, Fu) * F, Fu) <= 1e-8);
  CHECK(std::abs(F.norm() - u.norm()) <= 1e-8 * u.norm());

  // Hermite functions are eigenfunctions: h_k -> e^{-i k theta} h_k.
  const SampledField h2 = hermite_function(g, 2);
  const SampledField R = metaplectic_apply({MetaplecticGenerator::fractional_fourier(0.7)}, h2);
  CHECK(rel_diff(R, std::exp(cplx(0, -1.4)) * h2) <= 1e-8);

  // Dilation: |L|^{-1/2} u(x / L) on a Gaussian.
  const SampledField G = gaussian(g);
  const SampledField D = metaplectic_apply({MetaplecticGenerator::dilation(1.5)}, G);
  CHECK(max_abs(D - gaussian(g, 1.5, 1.0 / std::sqrt(1.5))) <= 1e-8);

  RMat P(1, 1);
  P << 0.8;
  const SampledField C = metaplectic_apply({MetaplecticGenerator::chirp_matrix(P)}, G);
  const SampledField chirped =
      SampledField::sample(g, [](const double* x) { return std::exp(cplx(-x[0] * x[0] / 2, 0.4 * x[0] * x[0])); });
  CHECK(max_abs(C - chirped) <= 1e-14);

  const std::vector<MetaplecticGenerator> seq = {MetaplecticGenerator::fractional_fourier(0.3),
                                                 MetaplecticGenerator::dilation(1.2),
                                                 MetaplecticGenerator::chirp_matrix(P)};
  CHECK(std::abs(metaplectic_apply(seq, u).norm() - u.norm()) <= 1e-8 * u.norm());
  CHECK(is_symplectic(metaplectic_projection(seq, 1)));

  CHECK(error_of([] { MetaplecticGenerator::dilation(-1.0); }) == Errc::InvalidArgument);
  RMat asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK(error_of([&] { MetaplecticGenerator::chirp_matrix(asym); }) == Errc::InvalidArgument);
}

TEST_CASE("symplectic covariance W(Su, Sv)(z) = W(u, v)(S^{-1} z)") {
  const GridSpec& g = line();
  std::mt19937_64 rng(6);
  const SampledField u = random_field(g, rng), v = random_field(g, rng);
  const SampledField W = cross_wigner(u, v);
  RMat P(1, 1);
  P << 0.5;
  for (const auto& gens : {std::vector<MetaplecticGenerator>{MetaplecticGenerator::fractional_fourier(0.3)},
                           std::vector<MetaplecticGenerator>{MetaplecticGenerator::chirp_matrix(P)},
                           std::vector<MetaplecticGenerator>{MetaplecticGenerator::dilation(1.25)}}) {
    const RMat S = metaplectic_projection(gens, 1);
    const SampledField lhs = cross_wigner(metaplectic_apply(gens, u), metaplectic_apply(gens, v));
    ResampleOptions ro;
    ro.verify = false;
    const SampledField rhs = linear_substitution(W, S.inverse(), 1.0, W.grid, ro);
    CHECK(rel_max(lhs, rhs) <= 1e-6);
  }
}
