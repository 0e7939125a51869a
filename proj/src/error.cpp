#include "qadd/error.hpp"

namespace qadd {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::SingularStrict: return "SingularStrict";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::SizeCap: return "SizeCap";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::QuadratureNonConvergent: return "QuadratureNonConvergent";
    case ErrorCode::NotFinitelyGenerated: return "NotFinitelyGenerated";
    case ErrorCode::NoSupportElement: return "NoSupportElement";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::OptimizerNotCertified: return "OptimizerNotCertified";
    case ErrorCode::FixpointDiverged: return "FixpointDiverged";
    case ErrorCode::RateOutOfWindow: return "RateOutOfWindow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace qadd
