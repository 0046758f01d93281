#pragma once

#include <stdexcept>
#include <string>

namespace hartree {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Grid construction parameters out of range.
class InvalidGrid : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and an operator) live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A density field carries a negative value where positivity is required.
class NegativeDensity : public Error {
 public:
  using Error::Error;
};

/// Entropy function evaluated outside its domain s >= 0.
class NegativeArgument : public Error {
 public:
  using Error::Error;
};

/// Concavity exponent undefined because beta vanishes away from zero.
class UndefinedAtZero : public Error {
 public:
  using Error::Error;
};

/// Model parameter (mass, temperature, exponent, ...) out of range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Temperature must be strictly positive for a thermal solve.
class InvalidTemperature : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical kernel failed to reach its tolerance.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// No bound states available to occupy.
class EmptySpectrum : public Error {
 public:
  using Error::Error;
};

/// The bound spectrum cannot carry the requested mass at any mu < 0.
class MassNotAttainable : public Error {
 public:
  using Error::Error;
};

/// Fewer bound levels than an operation requires.
class InsufficientSpectrum : public Error {
 public:
  using Error::Error;
};

/// Descent made no progress at the smallest admissible step.
class Stagnation : public Error {
 public:
  using Error::Error;
};

/// Config text could not be parsed; message carries the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Config parsed but a field failed validation; message names the field.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace hartree
