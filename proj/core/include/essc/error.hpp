#pragma once

#include <stdexcept>
#include <string>

namespace essc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or out-of-domain parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Spectrum handed to the inverse transform is not conjugate-symmetric.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Gain requested for the no-deformation class.
class NotAFilterError : public Error {
 public:
  using Error::Error;
};

/// SNR is undefined because the signal is identically zero.
class UndefinedSnrError : public Error {
 public:
  using Error::Error;
};

/// No sample exceeded the pulse-detection threshold.
class NoPulseDetectedError : public Error {
 public:
  using Error::Error;
};

/// Matrix/vector dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Training dataset does not contain every class.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Every training cycle diverged.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Model and dataset were built with different feature modes.
class ModeMismatchError : public Error {
 public:
  using Error::Error;
};

/// Malformed file or stream contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected; the message lists every offending key.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace essc
