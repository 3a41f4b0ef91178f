#pragma once
// Heisenberg-Weyl and Grossmann-Royer operators on R^n, deformed phase-space
// translations on R^{2n}, and a small set of metaplectic generators.

#include <vector>

#include "bopp/grid.hpp"
#include "bopp/symplectic.hpp"

namespace bopp {

// T(z0) u(x) = exp(i(xi0.x - xi0.x0/2)) u(x - x0).
SampledField heisenberg_weyl(const RVec& z0, const SampledField& u);

// T_GR(z0) u(x) = exp(2i xi0.(x - x0)) u(2x0 - x); 2x0 must sit on the lattice.
SampledField grossmann_royer(const RVec& z0, const SampledField& u);

// T_omega(z0) U(z) = exp(-i omega(z, z0)) U(z - z0/2).
SampledField phase_translate_omega(const RVec& z0, const SampledField& U, const SymplecticForm& form);

struct MetaplecticGenerator {
  enum class Kind { FractionalFourier, Dilation, Chirp };
  Kind kind = Kind::FractionalFourier;
  double angle = 0.0;  // fractional Fourier angle (radians)
  double scale = 1.0;  // dilation factor
  RMat chirp;          // symmetric n x n

  static MetaplecticGenerator fractional_fourier(double angle);
  static MetaplecticGenerator dilation(double scale);
  static MetaplecticGenerator chirp_matrix(const RMat& P);
};

SampledField metaplectic_apply(const std::vector<MetaplecticGenerator>& gens, const SampledField& u,
                               const ResampleOptions& opt = {});

// Phase-space matrix S of a generator sequence: W(Su, Sv)(z) = W(u, v)(S^{-1} z).
RMat metaplectic_projection(const std::vector<MetaplecticGenerator>& gens, int n);

// Unit complex c minimizing |c a - b|; used for comparisons modulo a global phase.
cplx fitted_phase(const SampledField& a, const SampledField& b);

}  // namespace bopp
