#pragma once
// Modulation-space norms M_s^q on R^n, the symbol norm M_s^{inf,1} on R^{2n},
// range membership for W_{f,phi} images and the capacity certificate.

#include <limits>
#include <string>
#include <vector>

#include "bopp/spectral.hpp"
#include "bopp/wavepacket.hpp"
#include "bopp/weyl.hpp"

namespace bopp {

struct ModNormParams {
  double s = 0.0;  // weight exponent of v_s(z) = (1 + |z|^2)^{s/2}
  double q = 2.0;  // >= 1, or infinity
  Window window;
};

double weight_vs(const double* z, int dim, double s);

// Weighted L^q norm of a field on R^{2n}; q = infinity is the grid sup.
double lq_norm(const SampledField& U, double s, double q);

// |W_phi u|_{L^q_s}.
double mod_norm(const SampledField& u, const ModNormParams& p);

struct EquivalenceReport {
  std::vector<double> ratios;  // |u|_{phi1} / |u|_{phi2}
  double C = 1.0;              // max(max ratio, 1 / min ratio)
};

EquivalenceReport window_equivalence(const std::vector<SampledField>& testset, const Window& phi1, const Window& phi2,
                                     double s, double q);

// Largest accepted points per axis for the R^4 sup-integral.
inline constexpr int kSjostrandMaxPoints = 24;

// int sup_z |W(a, Phi)(z, zeta) v_s(z)| dzeta; a sampled on Phi's grid of R^2.
double sjostrand_norm(const SymbolSpec& a, const Window& Phi, double s);

struct SjostrandInvarianceReport {
  double lhs = 0.0;    // |a o f|_Phi
  double rhs = 0.0;    // |a|_{Phi o f^{-1}}
  double ratio = 0.0;  // lhs / rhs, the empirical constant
  double weight_constant = 1.0;  // (1 + |f|^2)^{s/2}
  bool finite_together = false;
};

SjostrandInvarianceReport sjostrand_invariance_check(const SymbolSpec& a, const RMat& f, const Window& Phi, double s);

struct MembershipReport {
  double residual = 0.0;     // |P U - U| / |U|
  double pulled_norm = 0.0;  // mod_norm of u = W_{f,phi}^* U
  bool member = false;
  SampledField pulled;
};

// Membership in L^q_{f,phi}: U lives on a grid of R^{2n}, function_grid on R^n.
MembershipReport range_membership(const SampledField& U, const DarbouxFactor& factor, const ModNormParams& p,
                                  const GridSpec& function_grid, double tol = 1e-4);

struct PropregReport {
  double max_ratio = 0.0;  // max |u_out|_{M} / |u_in|_{M}
  double max_residual = 0.0;
  bool membership_preserved = false;
  std::vector<double> ratios;
};

// Applies A~_omega to members of L^q_{f,phi} and re-tests membership of the outputs.
PropregReport propreg_check(const SymbolSpec& a, const SymplecticForm& form, const DarbouxFactor& factor,
                            const ModNormParams& p, const std::vector<SampledField>& testset,
                            const GridSpec& function_grid, const PhaseOptions& opt = {});

enum class Verdict { Consistent, Violates };
const char* verdict_name(Verdict v);

struct ConcentrationReport {
  double capacity = 0.0;
  double C = 0.0;  // fitted envelope constant
  Verdict verdict = Verdict::Consistent;
};

// Fits |U(z)| <= C exp(-M z.z) on the central half box, checks it out to the outer
// 10% shell (BoundNotSatisfied otherwise), and compares the capacity with pi.
ConcentrationReport concentration_certificate(const SampledField& U, const WignerEllipsoid& M);

struct WeightReport {
  double max_ratio = 0.0;  // max v_s(f z) / v_s(z) over the grid
  double bound = 1.0;      // (1 + |f|_2^2)^{s/2}
  bool holds = false;
};

WeightReport weight_inequality_check(const RMat& f, double s, const GridSpec& g);

}  // namespace bopp
