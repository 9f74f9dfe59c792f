#pragma once

#include <stdexcept>
#include <string>

namespace lexfun {

/// Violated precondition on a mathematical object (bad triplet, bad flags).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical procedure failed to deliver a trustworthy value.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::string diagnostics = {})
      : std::runtime_error(diagnostics.empty() ? what : what + " [" + diagnostics + "]"),
        diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace lexfun
