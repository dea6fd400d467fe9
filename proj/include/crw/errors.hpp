#pragma once

#include <stdexcept>
#include <string>

namespace crw {

// Error taxonomy shared with the C API; values must match crw_status in crw.h.
enum class ErrorCode : int {
  None = 0,
  Domain = 1,            // parameter or invariant violation
  Parse = 2,             // malformed JSON or pattern text
  DegenerateLambda = 3,  // p == q: only the trivial exponential-martingale base exists
  DegenerateDrift = 4,   // zero-drift chain: the nonlinear system has only the trivial root
  NoConvergence = 5,
  Singular = 6,
  NonAbsorbing = 7,
  BudgetExceeded = 8,
  Reducible = 9,
  NotMarkov = 10,
  Internal = 11,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::None: return "ok";
    case ErrorCode::Domain: return "domain_error";
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::DegenerateLambda: return "degenerate_lambda";
    case ErrorCode::DegenerateDrift: return "degenerate_drift";
    case ErrorCode::NoConvergence: return "no_convergence";
    case ErrorCode::Singular: return "singular_system";
    case ErrorCode::NonAbsorbing: return "non_absorbing";
    case ErrorCode::BudgetExceeded: return "budget_exceeded";
    case ErrorCode::Reducible: return "reducible_chain";
    case ErrorCode::NotMarkov: return "not_markov";
    case ErrorCode::Internal: return "internal_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace crw
