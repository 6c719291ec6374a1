#pragma once

#include <stdexcept>
#include <string>

namespace nifsim {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grids whose geometry or dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Fine grid cannot be block-averaged onto the requested detector.
class ResamplingError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or transform that failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Pattern analysis that found nothing to analyze.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// Invalid or incomplete scene configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File system or codec failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nifsim
