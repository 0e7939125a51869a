#pragma once

#include <stdexcept>
#include <string>

namespace qadd {

enum class ErrorCode {
  NonHermitian,
  SingularStrict,
  SupportViolation,
  SizeCap,
  ShapeMismatch,
  QuadratureNonConvergent,
  NotFinitelyGenerated,
  NoSupportElement,
  NotConverged,
  OptimizerNotCertified,
  FixpointDiverged,
  RateOutOfWindow,
  InvalidArgument,
  ParseError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool cond, ErrorCode c, const std::string& msg) {
  if (!cond) throw Error(c, msg);
}

}  // namespace qadd
