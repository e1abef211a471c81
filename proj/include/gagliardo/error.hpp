#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gagliardo {

enum class ErrorKind {
  invalid_argument,
  non_integrable_tail,
  budget_exceeded,
  unsupported_exponent,
  missing_gradient,
  nonzero_mean,
  regime_mismatch,
  degenerate_fit,
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gagliardo
