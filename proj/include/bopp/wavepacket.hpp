#pragma once
// Cross-Wigner transform and the wavepacket maps W_phi, W_{f,phi}.
//
// The cross-Wigner transform of fields on a grid G lives on phase_space_grid(G):
// x axes from G, xi axes from its dual.  Half-lattice arguments x +- y/2 are
// produced by exact Fourier half-step shifts.  y runs over [-2L, 2L) so that the
// full support of u(x + y/2) conj(v(x - y/2)) is covered for every x in the box.

#include <vector>

#include "bopp/grid.hpp"
#include "bopp/symplectic.hpp"

namespace bopp {

// Normalized Hermite function with index ks[a] on axis a and the given width
// (width 1: h_0(x) = pi^{-1/4} exp(-x^2/2)); renormalized on the grid.
SampledField hermite_function(const GridSpec& g, const std::vector<int>& ks, double width = 1.0);
SampledField hermite_function(const GridSpec& g, int k, double width = 1.0);

struct Window {
  SampledField field;
  bool norm_one = true;

  static Window from_field(const SampledField& f, bool normalize = true);
  static Window hermite(const GridSpec& g, int k, double width = 1.0);
};

SampledField cross_wigner(const SampledField& u, const SampledField& v);

// W_phi u = (2 pi)^{n/2} W(u, phi).
SampledField wavepacket(const Window& phi, const SampledField& u);
// (2/pi)^{n/2} sum_z0 U(z0) T_GR(z0) phi dz0.
SampledField wavepacket_adjoint(const Window& phi, const SampledField& U);
// P_phi U = W_phi W_phi^* U.
SampledField projector(const Window& phi, const SampledField& U);
// Recovers u from U = W_phi u; NotInRange when |P_phi U - U| > tol |U|.
SampledField wavepacket_inverse(const Window& phi, const SampledField& U, double tol = 1e-4);

// W_{f,phi} u = M_f^{-1} W_phi u, on the lattice f(phase grid) unless given.
SampledField wavepacket_f(const DarbouxFactor& factor, const Window& phi, const SampledField& u,
                          const GridSpec* out_grid = nullptr, const ResampleOptions& opt = {});
// W_{f,phi}^* U = W_phi^* M_f U.
SampledField wavepacket_f_adjoint(const DarbouxFactor& factor, const Window& phi, const SampledField& U,
                                  const GridSpec& function_grid, const ResampleOptions& opt = {});

// Phi_{j,k} = W_{f, phi_j} phi_k for Hermite windows and functions, ordered j-major.
std::vector<SampledField> basis_generate(const DarbouxFactor& factor, const GridSpec& g, const std::vector<int>& js,
                                         const std::vector<int>& ks, double width = 1.0, int max_index = 5);
// Same with explicit windows and functions.
std::vector<SampledField> basis_generate(const DarbouxFactor& factor, const std::vector<Window>& windows,
                                         const std::vector<SampledField>& functions);

}  // namespace bopp
