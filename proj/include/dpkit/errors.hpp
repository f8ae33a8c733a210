#pragma once

#include <stdexcept>
#include <string>

namespace dpkit {

// Error taxonomy shared by every module. The C API maps these onto
// dpkit_status codes one-to-one where a code exists.
enum class ErrorKind {
  InvalidSpec,
  HorizonMismatch,
  NonConvergence,
  SingularEvaluation,
  TooLarge,
  InvalidAfterPerturb,
  Parse,
  Io,
  Usage,
  Precondition,
  Provider,
  MockExhausted,
  LabelParse,
  EmptyCorpus,
  EmptyStore,
  VerificationFailure,
  KTooLarge,
  GroupTooSmall,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) raise(kind, message);
}

}  // namespace dpkit
