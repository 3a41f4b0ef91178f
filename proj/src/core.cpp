#include "bopp/core.hpp"

namespace bopp {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotAntisymmetric: return "NotAntisymmetric";
    case Errc::Singular: return "Singular";
    case Errc::OddDimension: return "OddDimension";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::FactorizationFailed: return "FactorizationFailed";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::GridInvalid: return "GridInvalid";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::GridCapExceeded: return "GridCapExceeded";
    case Errc::ResampleInaccurate: return "ResampleInaccurate";
    case Errc::OffLatticeReflection: return "OffLatticeReflection";
    case Errc::MidpointUnavailable: return "MidpointUnavailable";
    case Errc::NotSymplectic: return "NotSymplectic";
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NotInRange: return "NotInRange";
    case Errc::IndexCap: return "IndexCap";
    case Errc::DegenerateProjection: return "DegenerateProjection";
    case Errc::BoundNotSatisfied: return "BoundNotSatisfied";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace bopp
