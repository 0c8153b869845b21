#pragma once

#include <stdexcept>
#include <string>

namespace plateau {

enum class ErrorKind {
  InvalidWidth,
  InvalidGate,
  InvalidIndex,
  DimensionMismatch,
  NormError,
  ZeroNorm,
  Capacity,
  InvalidArgument,
  Parse,
  Config,
  Io,
};

/// Single exception type for the library; `kind()` classifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace plateau
