#pragma once

#include <stdexcept>
#include <string>

namespace pfn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes that do not line up, or non-finite inputs.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A model whose structure or product form is inconsistent.
class ModelError : public Error {
public:
  using Error::Error;
};

/// Malformed model or configuration file.
class ParseError : public Error {
public:
  using Error::Error;
};

/// The requested target lies outside the open achievable region, or an
/// iterative solve drifted off to infinity trying to reach it.
class NotAchievableError : public Error {
public:
  using Error::Error;
};

/// Iteration budget exhausted before the stopping tolerance was met.
class MaxIterationsError : public Error {
public:
  MaxIterationsError(const std::string& what, double grad_norm)
      : Error(what), grad_norm_(grad_norm) {}
  double grad_norm() const noexcept { return grad_norm_; }

private:
  double grad_norm_;
};

/// Schedule parameters outside their admissible range.
class ScheduleError : public Error {
public:
  ScheduleError(const std::string& what, double min_delta)
      : Error(what), min_delta_(min_delta) {}
  /// Smallest admissible delta for the requested kind and alpha.
  double min_delta() const noexcept { return min_delta_; }

private:
  double min_delta_;
};

/// Run configuration that is inconsistent with the model (box, sizes).
class ConfigError : public Error {
public:
  using Error::Error;
};

class SimulationError : public Error {
public:
  using Error::Error;
};

}  // namespace pfn
