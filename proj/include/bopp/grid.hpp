#pragma once
// Uniform periodic grids, sampled fields, and the Fourier family built on FFTW.
//
// Axis a of a grid carries the points x_k = (k - N/2) h_a, k = 0..N-1, with
// h_a = 2 L_a / N, so the domain is [-L_a, L_a).  Values are stored row-major
// with the last axis fastest.  The frequency grid of a field has spacing
// 2 pi / (N h_a); a grid with h_a^2 N = 2 pi is its own dual.

#include <cstddef>
#include <functional>
#include <vector>

#include "bopp/core.hpp"
#include "bopp/symplectic.hpp"

namespace bopp {

struct GridSpec {
  int dim = 1;
  int points = 64;
  std::vector<double> halfwidth;

  static GridSpec make(int dim, int points, double L);
  static GridSpec make(int points, std::vector<double> L);
  // h^2 N = 2 pi * scale on every axis.
  static GridSpec self_dual(int dim, int points, double scale = 1.0);

  double spacing(int axis) const { return 2.0 * halfwidth[axis] / points; }
  double coord(int axis, long k) const { return static_cast<double>(k - points / 2) * spacing(axis); }
  std::size_t total() const;
  double cell() const;  // product of spacings
  GridSpec dual() const;
  bool matches(const GridSpec& other, double rtol = 1e-12) const;
  void validate() const;
  void point(std::size_t idx, double* z) const;
};

// Largest accepted number of grid points (adjustable for tests).
std::size_t& grid_point_cap();

// Grid on R^{2n} whose x axes are g and whose xi axes are the dual of g.
GridSpec phase_space_grid(const GridSpec& g);

// Image grid {g y : y in G} for a monomial g (one nonzero per row); returns G
// unchanged when g mixes axes.
GridSpec grid_image(const GridSpec& G, const RMat& g);

// A grid on R^{2n} on which F_omega is an exact index remap, when one exists
// (Omega = cJ, or a Theta-only block form); otherwise the self-dual grid
// rescaled by |det Omega|^{1/2n}.
GridSpec adapted_grid(const SymplecticForm& form, int points, bool* exact = nullptr);

struct SampledField {
  GridSpec grid;
  std::vector<cplx> values;

  SampledField() = default;
  explicit SampledField(const GridSpec& g);

  static SampledField sample(const GridSpec& g, const std::function<cplx(const double*)>& fn);

  double norm() const;
  // Fraction of |U|^2 carried by the outer 10% shell of the box.
  double boundary_mass() const;
  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
};

SampledField operator+(const SampledField& a, const SampledField& b);
SampledField operator-(const SampledField& a, const SampledField& b);
SampledField operator*(cplx s, const SampledField& a);

cplx inner(const SampledField& U, const SampledField& V);
double norm(const SampledField& U);
// |U - V| / |V|
double rel_diff(const SampledField& U, const SampledField& V);

// Unnormalized centered DFT over every axis: out_j = sum_k e^{sign 2 pi i (j-N/2)(k-N/2)/N} in_k.
void dft_centered(std::vector<cplx>& data, int points, int dim, int sign);
// Same over one axis, uncentered indices.
void dft_axis(std::vector<cplx>& data, int points, int dim, int axis, int sign);

// (2 pi)^{-d/2} int e^{sign i x.w} U(x) dx, sampled on the dual grid.
SampledField fourier(const SampledField& U, int sign);

SampledField sympl_fourier_sigma(const SampledField& A);

struct ResampleOptions {
  bool verify = true;
  double tol = 1e-6;
  double* estimate = nullptr;  // receives the round-trip residual when computed
};

SampledField sympl_fourier_omega(const SampledField& A, const SymplecticForm& form, const ResampleOptions& opt = {});

// out(z) = scale * U(T z) for z on out_grid; exact index remap when T maps the
// lattice of out_grid into that of U, trigonometric interpolation otherwise.
SampledField linear_substitution(const SampledField& U, const RMat& T, double scale, const GridSpec& out_grid,
                                 const ResampleOptions& opt = {});
bool substitution_is_exact(const GridSpec& in, const RMat& T, const GridSpec& out);

enum class Direction { Forward, Inverse };

// M_f U(z) = |det f|^{1/2} U(f z); the inverse uses f^{-1}.  The default output
// grid is the lattice that keeps the substitution exact when f is monomial.
SampledField pushforward_Mf(const SampledField& U, const DarbouxFactor& factor, Direction dir,
                            const GridSpec* out_grid = nullptr, const ResampleOptions& opt = {});
SampledField pushforward_matrix(const SampledField& U, const RMat& f, Direction dir, const GridSpec* out_grid = nullptr,
                                const ResampleOptions& opt = {});

// U(z - s) by Fourier phase shift; integer lattice shifts are exact rolls.
SampledField shift_field(const SampledField& U, const std::vector<double>& s);

// Same field on the grid with N' = 2N and the same box (trigonometric upsampling).
SampledField upsample2(const SampledField& U);

// Band-limited periodic interpolant of a field, evaluable anywhere.
class TrigInterpolator {
 public:
  explicit TrigInterpolator(const SampledField& U);
  cplx operator()(const double* p) const;

 private:
  GridSpec grid_;
  std::vector<cplx> coeff_;
  mutable std::vector<std::vector<cplx>> phase_;
  mutable std::vector<cplx> work_;
};

// Contract a tensor of shape N^dim with one vector per axis.
cplx contract_axes(const std::vector<cplx>& data, int points, int dim, const std::vector<std::vector<cplx>>& vecs,
                   std::vector<cplx>& work);

}  // namespace bopp
