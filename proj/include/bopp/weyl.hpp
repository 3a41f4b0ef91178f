#pragma once
// Weyl operators on R^n, the phase-space operators A~_omega on R^{2n}, symbol
// lifting and the twisted product.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "bopp/grid.hpp"
#include "bopp/symplectic.hpp"

namespace bopp {

// a(z) = c0 + b.z + z^T Q z / 2.
struct QuadraticData {
  cplx c0 = 0.0;
  RVec b;
  RMat Q;
};

struct SymbolSpec {
  int domain_dim = 2;
  std::function<cplx(const double*)> fn;          // closed form
  std::shared_ptr<const SampledField> refined;    // or samples on a 2x refined grid
  std::optional<cplx> constant;
  std::optional<QuadraticData> quadratic;
  std::string name;

  cplx operator()(const double* z) const;
  bool closed_form() const { return static_cast<bool>(fn); }
};

SymbolSpec symbol_closed(int dim, std::function<cplx(const double*)> fn, std::string name = "closed");
SymbolSpec symbol_constant(int dim, cplx c);
SymbolSpec symbol_quadratic(const QuadraticData& q, std::string name = "quadratic");
// scale * |z|^2 / 2 on R^{2n}.
SymbolSpec symbol_harmonic(int n, double scale = 1.0);
// amplitude * exp(-|z - center|^2 / (2 width^2)).
SymbolSpec symbol_gaussian(const RVec& center, double width, cplx amplitude = 1.0);
// z_axis.
SymbolSpec symbol_linear(int dim, int axis);
// a(z) * exp(-|z|^2 / (2 width^2)).
SymbolSpec symbol_tapered(const SymbolSpec& a, double width);
SymbolSpec symbol_sum(const SymbolSpec& a, const SymbolSpec& b);
// a o f.
SymbolSpec compose_linear(const SymbolSpec& a, const RMat& f);
// Sampled symbol from its values on a base grid (upsampled 2x internally).
SymbolSpec symbol_from_field(const SampledField& base);
SampledField sample_symbol(const SymbolSpec& a, const GridSpec& g);

struct OperatorMatrix {
  GridSpec grid;
  CMat entries;  // (A U)(z_p) ~ sum_q entries(p, q) U(z_q)
  bool hermitian_flag = false;

  SampledField apply(const SampledField& U) const;
  double hermiticity_residual() const;  // |A - A^H|_max / |A|_max
};

OperatorMatrix make_operator(const GridSpec& g, CMat entries);

// Standard Weyl operator on R^n with kernel K(x, y) = (2pi)^{-n} int e^{i(x-y)xi} a((x+y)/2, xi) dxi.
OperatorMatrix weyl_kernel(const SymbolSpec& a, const GridSpec& g);
// a(x, xi) = int e^{-i xi y} K(x + y/2, x - y/2) dy on phase_space_grid(K.grid).
SymbolSpec symbol_from_kernel(const OperatorMatrix& K);

// a~(z, zeta) = a(z - Omega zeta / 2) on R^{4n}.
SymbolSpec lift_symbol(const SymbolSpec& a, const SymplecticForm& form);

struct PhaseOptions {
  enum class Route { Auto, Kernel, Lifted };
  Route route = Route::Auto;
  double quad_halfwidth = 8.0;  // box in z covered by the F_omega a quadrature
  int quad_points = 256;        // per axis
  std::size_t cap = 4096;       // dense matrix cap (grid points)
};

// F_omega a sampled at the points 2 k h (k in [-N, N)) of the doubled lattice of g.
SampledField fomega_symbol_doubled(const SymbolSpec& a, const SymplecticForm& form, const GridSpec& g,
                                   const PhaseOptions& opt = {});
// F_omega a sampled on the lattice of g itself.
SampledField fomega_symbol_lattice(const SymbolSpec& a, const SymplecticForm& form, const GridSpec& g,
                                   const PhaseOptions& opt = {});

// Dense A~_omega on a grid of R^{2n}.  Kernel route: K(z, u) = (2/pi)^n |det Omega|^{-1/2}
// F_omega a(2(z - u)) e^{2i omega(z, u)}.  Lifted route (quadratic symbols): the Bopp
// substitution z -> z + (i/2) Omega d/dz with spectral derivatives.  Constants: c I.
OperatorMatrix phase_weyl_matrix(const SymbolSpec& a, const SymplecticForm& form, const GridSpec& g,
                                 const PhaseOptions& opt = {});

// (2pi)^{-n} |det Omega|^{-1/2} sum_z0 F_omega a(z0) T~_omega(z0) U dz0 over the lattice of U.
SampledField phase_weyl_apply_quadrature(const SymbolSpec& a, const SymplecticForm& form, const SampledField& U,
                                         const PhaseOptions& opt = {});

// c = a # b by direct summation of the twisted convolution of F_sigma a, F_sigma b on g.
SymbolSpec twisted_product(const SymbolSpec& a, const SymbolSpec& b, const GridSpec& g, std::size_t cap = 4096);

struct ConjugationReport {
  double residual = 0.0;  // max over probes of |A'' U - M_S A' M_S^{-1} U| / |A'' U|
  int probes = 0;
};

// A' has symbol a o f, A'' has a o f S; both are sigma operators on g.
ConjugationReport conjugation_check(const SymbolSpec& a, const SymplecticForm& form, const RMat& S, const GridSpec& g,
                                    const PhaseOptions& opt = {});

struct EquaReport {
  double residual = 0.0;  // |M_f A~_omega - A' M_f|_F / |A' M_f|_F
};

// M_f A~_omega = A' M_f for monomial f, with A~_omega on adapted_grid(form, N) and A' on the self-dual grid.
EquaReport equa_check(const SymbolSpec& a, const SymplecticForm& form, int points, const PhaseOptions& opt = {});

}  // namespace bopp
