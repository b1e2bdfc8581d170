#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace driftlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input: violated preconditions, malformed specs, mismatched meshes.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
public:
  NumericalError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}

  /// Relative residuals recorded by the failing iteration, if any.
  const std::vector<double>& history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

/// File or serialization failure.
class IoError : public Error {
public:
  using Error::Error;
};

[[noreturn]] inline void fail_validation(const std::string& msg) { throw ValidationError(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace driftlab
