#pragma once

#include <stdexcept>
#include <string>

namespace dgpe {

// Error taxonomy; the CLI maps these onto distinct exit codes.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Bad field/parameter content fed to an otherwise well-configured operation.
struct InputError : ConfigError {
  explicit InputError(const std::string& m) : ConfigError(m) {}
};

// Grid/shape mismatch between operands.
struct ShapeError : ConfigError {
  explicit ShapeError(const std::string& m) : ConfigError(m) {}
};

// Operation requested outside its parameter regime (e.g. ground state in SR).
struct RegimeError : ConfigError {
  explicit RegimeError(const std::string& m) : ConfigError(m) {}
};

struct ConvergenceError : std::runtime_error {
  double last_residual;
  ConvergenceError(const std::string& m, double r)
      : std::runtime_error(m), last_residual(r) {}
};

// NaN/Inf contamination or a failed internal consistency check.
struct NumericalHealthError : std::runtime_error {
  explicit NumericalHealthError(const std::string& m) : std::runtime_error(m) {}
};

// Ground-state identity verification failure.
struct VerificationError : NumericalHealthError {
  explicit VerificationError(const std::string& m) : NumericalHealthError(m) {}
};

}  // namespace dgpe
