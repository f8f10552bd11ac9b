#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace qsdcat {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested Hilbert space or dense oracle exceeds the configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Operands live on incompatible spaces or have mismatched dimensions.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Spin input is not permutation symmetric but the Symmetric representation was requested.
class RepresentationError : public Error {
 public:
  using Error::Error;
};

/// A cat superposition cancelled to (numerically) zero norm.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument to an analysis or construction routine.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Numerical guard abort during integration. Carries the simulation time when known.
class NumericalGuardError : public Error {
 public:
  explicit NumericalGuardError(const std::string& what, std::optional<double> time = std::nullopt)
      : Error(what), time_(time) {}
  std::optional<double> time() const { return time_; }

 private:
  std::optional<double> time_;
};

/// Fock-space truncation leaked more population than allowed.
class TruncationError : public NumericalGuardError {
 public:
  using NumericalGuardError::NumericalGuardError;
};

/// Single-step norm drift exceeded the step guard; dt is too large.
class StepSizeError : public NumericalGuardError {
 public:
  using NumericalGuardError::NumericalGuardError;
};

/// Configuration document failed to parse or violates an invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed data file. Carries the byte offset of the offending content.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"), offset_(byte_offset) {}
  std::size_t byte_offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace qsdcat
