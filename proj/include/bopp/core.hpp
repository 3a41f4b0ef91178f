#pragma once
// Shared scalar types and the error taxonomy used by every module.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bopp {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

enum class Errc {
  NotAntisymmetric,
  Singular,
  OddDimension,
  DimensionMismatch,
  FactorizationFailed,
  NotPositiveDefinite,
  GridInvalid,
  GridMismatch,
  GridCapExceeded,
  ResampleInaccurate,
  OffLatticeReflection,
  MidpointUnavailable,
  NotSymplectic,
  NotHermitian,
  NotInRange,
  IndexCap,
  DegenerateProjection,
  BoundNotSatisfied,
  InvalidArgument,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace bopp
