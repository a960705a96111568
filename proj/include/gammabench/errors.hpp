#pragma once

#include <stdexcept>
#include <string>

namespace gammabench {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sem_kernel
class DegreeTooSmallError : public Error {
 public:
  using Error::Error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class GeometryError : public Error {
 public:
  using Error::Error;
};
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// partition
class OverDecompositionError : public Error {
 public:
  using Error::Error;
};
class UndefinedProfileError : public Error {
 public:
  using Error::Error;
};

// gamma_model
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};
class CalibrationDegenerateError : public Error {
 public:
  using Error::Error;
};
class NoDataError : public Error {
 public:
  using Error::Error;
};

// harness / cli
class SpecInvalidError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Thrown by argument validation that does not fit one of the domain kinds.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace gammabench
