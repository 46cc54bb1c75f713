#pragma once

#include <stdexcept>
#include <string>

namespace deblur {

// Base class for everything this library throws. The C API maps each
// subtype to a status code; the CLI maps the codes to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Downsampling would produce a grid below the minimum working size.
class PyramidTooDeepError : public InvalidArgumentError {
 public:
  using InvalidArgumentError::InvalidArgumentError;
};

// A kernel raster with no positive mass cannot be normalized.
class DegenerateKernelError : public Error {
 public:
  using Error::Error;
};

// Non-finite values appeared inside a solver loop. Carries enough
// context (scale / outer / inner indices) to locate the failure.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int scale, int outer, int inner)
      : Error(what), scale_(scale), outer_(outer), inner_(inner) {}

  int scale() const { return scale_; }
  int outer() const { return outer_; }
  int inner() const { return inner_; }

  DivergenceError with_context(int scale, int outer) const {
    std::string msg = std::string(what()) + " [scale " + std::to_string(scale) +
                      ", outer iteration " + std::to_string(outer) + "]";
    return DivergenceError(msg, scale, outer, inner_);
  }

 private:
  int scale_ = -1;
  int outer_ = -1;
  int inner_ = -1;
};

}  // namespace deblur
