#pragma once
// Linear symplectic geometry on R^{2n}: forms, Darboux factors, capacities.

#include "bopp/core.hpp"

namespace bopp {

// Standard structure matrix J = [[0, I], [-I, 0]] of size 2n.
RMat standard_J(int n);

// sigma(z, z') = xi.x' - xi'.x for z = (x, xi).
double sigma_eval(const RVec& z, const RVec& zp);

struct SymplecticForm {
  int n = 1;
  RMat omega;
  RMat omega_inv;
  double det_abs = 1.0;
};

SymplecticForm build_form(const RMat& omega_matrix);
// Omega = [[Theta, I], [-I, N]].
SymplecticForm build_form_from_blocks(const RMat& theta, const RMat& nmat);
SymplecticForm standard_form(int n);

// omega(z, z') = z^T Omega^{-1} z'.
double omega_eval(const SymplecticForm& form, const RVec& z, const RVec& zp);

struct DarbouxFactor {
  RMat f;
  RMat f_inv;
  double residual = 0.0;
};

DarbouxFactor darboux_factor(const SymplecticForm& form);
// Wraps a caller-supplied f after checking f J f^T = Omega.
DarbouxFactor darboux_from_matrix(const SymplecticForm& form, const RMat& f);

struct WignerEllipsoid {
  RMat M;
};

WignerEllipsoid make_ellipsoid(const RMat& M);
double symplectic_capacity(const WignerEllipsoid& ell);

// S^T J S = J within tol (max-norm).
bool is_symplectic(const RMat& S, double tol = 1e-10);
RMat rotation2(double theta);

}  // namespace bopp
