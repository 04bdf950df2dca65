#pragma once

#include <stdexcept>
#include <string>

namespace gaitid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or argument violation (bad shapes, out-of-range parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical stage could not produce a trustworthy result.
class NumericalError : public Error {
 public:
  NumericalError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Shape data has no usable second oscillation axis (synchronized joints,
/// zero-area gait), so phase is undefined.
class DegenerateOscillation : public NumericalError {
 public:
  explicit DegenerateOscillation(const std::string& what)
      : NumericalError("phase", what) {}
};

}  // namespace gaitid
