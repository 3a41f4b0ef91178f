#pragma once
// Dense Hermitian eigensolves, spectrum transfer from A^ to A~_omega, and a
// sampling diagnostic for the Shubin estimates.

#include <string>
#include <vector>

#include "bopp/weyl.hpp"
#include "bopp/wavepacket.hpp"

namespace bopp {

struct SpectralResult {
  std::vector<double> eigenvalues;        // ascending
  std::vector<SampledField> eigenfields;  // unit norm on the operator grid
  std::vector<double> residuals;          // |A psi - lambda psi| / |psi|
};

// Full dense solve; `count` limits how many (lowest) eigenpairs are wrapped (-1: all).
SpectralResult eigensolve(const OperatorMatrix& A, int count = -1);

struct TransferEntry {
  int window = 0;    // j in Phi_{j,k} = W_{f, phi_j} phi_k
  int function = 0;  // k; the eigenvalue carried is lambda_k
  double lambda = 0.0;
  double residual = 0.0;  // |A~ Phi - lambda Phi| / |Phi|
};

struct TransferReport {
  std::vector<double> eigenvalues;  // lowest eigenvalues of A^' (symbol a o f)
  std::vector<TransferEntry> entries;
  double max_residual = 0.0;
  // max over k of (largest / smallest residual across windows j), with residuals
  // floored at kSpreadFloor; raw_window_spread is the same ratio without the floor
  double window_spread = 1.0;
  double raw_window_spread = 1.0;
};

// Residuals below this are treated as equal when comparing windows (1% of the transfer tolerance).
inline constexpr double kSpreadFloor = 1e-6;

// A^' on the self-dual grid of R^n, A~_omega on adapted_grid(form, points);
// checks A~ W_{f,phi_j} phi_k = lambda_k W_{f,phi_j} phi_k for j, k < count.
TransferReport spectrum_transfer_check(const SymbolSpec& a, const SymplecticForm& form, int count, int points = 64,
                                       const PhaseOptions& opt = {});

struct AdjointTransferReport {
  double lambda = 0.0;    // Rayleigh quotient of A^ at u
  double residual = 0.0;  // |A^ u - lambda u| / |u|
  double u_norm = 0.0;
};

// u = W_phi^* U and its Rayleigh residual under A^ (sigma case).
AdjointTransferReport adjoint_transfer_check(const SampledField& U, const Window& phi, const OperatorMatrix& Ahat,
                                             double degenerate_tol = 1e-6);

struct ShubinParams {
  double m0 = 2.0;
  double m1 = 2.0;
  double rho = 1.0;
  double R = 1.0;
  int max_order = 2;
};

struct ShubinReport {
  bool consistent = false;
  double C0 = 0.0;  // fitted lower constant
  double C1 = 0.0;  // fitted upper constant
  std::vector<double> C_alpha;  // per derivative order 1..max_order
  std::vector<double> radii;    // radii actually sampled (>= R)
  std::vector<double> lower;    // min |a| / r^{m0} per radius
  std::string note;
};

// Heuristic: samples spheres |z| = r and fits the constants of the Shubin estimates
// with central finite differences.  Never a proof.
ShubinReport shubin_diagnostic(const SymbolSpec& a, const ShubinParams& p, const std::vector<double>& radii);

struct ClassInvarianceReport {
  ShubinReport original;
  ShubinReport composed;
  bool agree = false;
};

ClassInvarianceReport symbol_class_invariance_check(const SymbolSpec& a, const ShubinParams& p, const RMat& f,
                                                    const std::vector<double>& radii);

}  // namespace bopp
