#pragma once

#include <stdexcept>
#include <string>

namespace ipiano {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters, infeasible step-size laws, malformed config or input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Anything that went wrong while doing arithmetic.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A gradient or prox output became non-finite; the step sizes diverged.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Backtracking pushed the Lipschitz estimate past its cap.
class NonSmoothError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A sparse solve broke down or missed its residual contract.
class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Inpainting mask is (numerically) zero, so the reconstruction is undefined.
class DegenerateMaskError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ipiano
