#pragma once
#include <stdexcept>
#include <string>

namespace etalab {

// Error taxonomy mirrors the CLI exit codes: Parse -> 2, Precondition -> 3,
// Budget -> 4.  Numeric failures (extrapolation not Cauchy, overflow in exact
// arithmetic) have no reserved code and map to the generic failure exit.
enum class ErrKind { Parse, Precondition, Budget, Numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void fail_parse(const std::string& msg) { throw Error(ErrKind::Parse, msg); }
[[noreturn]] inline void fail_precondition(const std::string& msg) { throw Error(ErrKind::Precondition, msg); }
[[noreturn]] inline void fail_budget(const std::string& msg) { throw Error(ErrKind::Budget, msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw Error(ErrKind::Numeric, msg); }

}  // namespace etalab
