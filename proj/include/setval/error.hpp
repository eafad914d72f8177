#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace setval {

enum class ErrorKind {
  OrderViolation,
  NonFinite,
  DimensionMismatch,
  EmptyFamily,
  NotInterval,
  NotAdapted,
  LengthMismatch,
  InvalidArgument,
  InvalidConfig,
  GridMismatch,
  NotMartingale,
  NotRepresentable,
  Inconsistent,
  UnknownExperiment,
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

}  // namespace setval
