#pragma once

#include <stdexcept>
#include <string>

namespace nongauss {

/// Invalid input or configuration: bad files, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An analysis ran on valid input but could not produce a result.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer failure in the PDF fit. Carries the moment-based estimate
/// so callers can fall back without refitting.
class FitError : public AnalysisError {
 public:
  FitError(const std::string& what, double fallback_lambda2)
      : AnalysisError(what), fallback_lambda2_(fallback_lambda2) {}

  [[nodiscard]] double fallback_lambda2() const noexcept { return fallback_lambda2_; }

 private:
  double fallback_lambda2_;
};

}  // namespace nongauss
