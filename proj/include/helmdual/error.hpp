#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helmdual {

enum class ErrorKind {
  ShellResonance,
  DomainError,
  InvalidArgument,
  GridMismatch,
  NotInUPlus,
  ZeroField,
  MaxIters,
  Diverged,
  NoSolutionFound,
  SupportOverflow,
  HypothesisViolated,
  InterpolationDegenerate,
  InsufficientShells,
  UnknownKey,
  TypeError,
  MissingRequired,
  BadMagic,
  VersionMismatch,
  TruncatedPayload,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace helmdual
