#pragma once

#include <stdexcept>
#include <string>

namespace conslaw {

enum class ErrorCode {
  Parse,
  UnknownSymbol,
  ArityMismatch,
  Unsupported,
  DivisionByZero,
  UnboundAtom,
  NotADivergence,
  NotNullDivergence,
  NoRuleApplies,
  IncompatibleFluxes,
  InvalidSystem,
  NotConserved,
  NonTermination,
  Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace conslaw
