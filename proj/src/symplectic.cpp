#include "bopp/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace bopp {

namespace {

double max_abs(const RMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void require_square_even(const RMat& m) {
  if (m.rows() != m.cols()) fail(Errc::DimensionMismatch, "matrix is not square");
  if (m.rows() == 0 || m.rows() % 2 != 0) fail(Errc::OddDimension, "phase space dimension must be even");
}

}  // namespace

RMat standard_J(int n) {
  RMat J = RMat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = RMat::Identity(n, n);
  J.bottomLeftCorner(n, n) = -RMat::Identity(n, n);
  return J;
}

double sigma_eval(const RVec& z, const RVec& zp) {
  if (z.size() != zp.size() || z.size() % 2) fail(Errc::DimensionMismatch, "sigma_eval");
  const int n = static_cast<int>(z.size() / 2);
  return z.tail(n).dot(zp.head(n)) - zp.tail(n).dot(z.head(n));
}

SymplecticForm build_form(const RMat& omega_matrix) {
  require_square_even(omega_matrix);
  const double scale = max_abs(omega_matrix);
  if (scale == 0.0) fail(Errc::Singular, "zero matrix");
  if (max_abs(omega_matrix + omega_matrix.transpose()) > 1e-12 * scale)
    fail(Errc::NotAntisymmetric, "Omega + Omega^T is not zero");
  Eigen::FullPivLU<RMat> lu(omega_matrix);
  if (!lu.isInvertible()) fail(Errc::Singular, "Omega is not invertible");
  SymplecticForm form;
  form.n = static_cast<int>(omega_matrix.rows() / 2);
  form.omega = omega_matrix;
  form.omega_inv = lu.inverse();
  // Antisymmetry survives inversion; symmetrize away the round-off.
  form.omega_inv = 0.5 * (form.omega_inv - form.omega_inv.transpose()).eval();
  const RMat check = form.omega * form.omega_inv - RMat::Identity(omega_matrix.rows(), omega_matrix.cols());
  if (max_abs(check) > 1e-10) fail(Errc::Singular, "Omega is numerically singular");
  form.det_abs = std::abs(lu.determinant());
  return form;
}

SymplecticForm build_form_from_blocks(const RMat& theta, const RMat& nmat) {
  if (theta.rows() != theta.cols() || nmat.rows() != nmat.cols() || theta.rows() != nmat.rows())
    fail(Errc::DimensionMismatch, "Theta and N must be square of equal size");
  const auto n = theta.rows();
  auto antisym = [](const RMat& m) {
    return max_abs(m + m.transpose()) <= 1e-12 * std::max(1.0, max_abs(m));
  };
  if (!antisym(theta)) fail(Errc::NotAntisymmetric, "Theta");
  if (!antisym(nmat)) fail(Errc::NotAntisymmetric, "N");
  RMat om(2 * n, 2 * n);
  om << theta, RMat::Identity(n, n), -RMat::Identity(n, n), nmat;
  return build_form(om);
}

SymplecticForm standard_form(int n) { return build_form(standard_J(n)); }

double omega_eval(const SymplecticForm& form, const RVec& z, const RVec& zp) {
  if (z.size() != 2 * form.n || zp.size() != 2 * form.n) fail(Errc::DimensionMismatch, "omega_eval");
  return z.dot(form.omega_inv * zp);
}

DarbouxFactor darboux_factor(const SymplecticForm& form) {
  const int n = form.n;
  const int d = 2 * n;
  Eigen::RealSchur<RMat> schur(form.omega);
  RMat Q = schur.matrixU();
  const RMat T = schur.matrixT();

  struct Plane {
    RVec a, b;
    double d;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < d;) {
    if (i + 1 >= d || std::abs(T(i + 1, i)) == 0.0)
      fail(Errc::FactorizationFailed, "real Schur form has a 1x1 block");
    const double dval = 0.5 * (T(i, i + 1) - T(i + 1, i));
    Plane p{Q.col(i), Q.col(i + 1), dval};
    if (p.d < 0) {
      std::swap(p.a, p.b);
      p.d = -p.d;
    }
    // Fix the in-plane rotation: the dominant coordinate r of the plane gets
    // a(r) > 0 and b(r) = 0.
    int r = 0;
    double best = -1.0;
    for (int k = 0; k < d; ++k) {
      const double w = p.a(k) * p.a(k) + p.b(k) * p.b(k);
      if (w > best + 1e-12) {
        best = w;
        r = k;
      }
    }
    const double rho = std::sqrt(best);
    const double c = p.a(r) / rho, s = p.b(r) / rho;
    const RVec na = c * p.a + s * p.b;
    const RVec nb = -s * p.a + c * p.b;
    p.a = na;
    p.b = nb;
    planes.push_back(p);
    i += 2;
  }
  std::stable_sort(planes.begin(), planes.end(), [](const Plane& x, const Plane& y) { return x.d > y.d + 1e-12; });

  RMat f(d, d);
  for (int i = 0; i < n; ++i) {
    const double s = std::sqrt(planes[i].d);
    f.col(i) = s * planes[i].a;
    f.col(n + i) = s * planes[i].b;
  }
  return darboux_from_matrix(form, f);
}

DarbouxFactor darboux_from_matrix(const SymplecticForm& form, const RMat& f) {
  if (f.rows() != 2 * form.n || f.cols() != 2 * form.n) fail(Errc::DimensionMismatch, "factor size");
  DarbouxFactor out;
  out.f = f;
  out.f_inv = f.inverse();
  out.residual = max_abs(f * standard_J(form.n) * f.transpose() - form.omega);
  if (out.residual > 1e-10 * max_abs(form.omega))
    fail(Errc::FactorizationFailed, "f J f^T differs from Omega by " + std::to_string(out.residual));
  return out;
}

WignerEllipsoid make_ellipsoid(const RMat& M) {
  if (M.rows() != M.cols() || M.rows() % 2) fail(Errc::DimensionMismatch, "ellipsoid matrix");
  if (max_abs(M - M.transpose()) > 1e-12 * std::max(1.0, max_abs(M)))
    fail(Errc::NotPositiveDefinite, "M is not symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(M);
  if (es.eigenvalues().minCoeff() <= 0.0) fail(Errc::NotPositiveDefinite, "M has a non-positive eigenvalue");
  return WignerEllipsoid{M};
}

double symplectic_capacity(const WignerEllipsoid& ell) {
  const int n = static_cast<int>(ell.M.rows() / 2);
  Eigen::EigenSolver<RMat> es(standard_J(n) * ell.M, false);
  double lmax = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) lmax = std::max(lmax, std::abs(es.eigenvalues()(i).imag()));
  if (lmax <= 0.0) fail(Errc::NotPositiveDefinite, "degenerate ellipsoid");
  return kPi / lmax;
}

bool is_symplectic(const RMat& S, double tol) {
  if (S.rows() != S.cols() || S.rows() % 2) return false;
  const RMat J = standard_J(static_cast<int>(S.rows() / 2));
  return max_abs(S.transpose() * J * S - J) <= tol;
}

RMat rotation2(double theta) {
  RMat r(2, 2);
  r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace bopp
