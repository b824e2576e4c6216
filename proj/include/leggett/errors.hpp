#pragma once

#include <stdexcept>
#include <string>

namespace leggett {

/// Base class for all domain failures raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Settings violate the orthogonal-plane geometry a protocol requires.
class GeometryError : public Error {
public:
  using Error::Error;
};

/// Both vectors of a pair are collinear and nothing else fixes the plane.
class DegeneratePlane : public GeometryError {
public:
  using GeometryError::GeometryError;
};

/// Hidden-variable model evaluated outside |a.b +- u.a| <= 1 -+ v.b.
class ModelInvalid : public Error {
public:
  ModelInvalid(const std::string &what, double invalid_fraction = 1.0)
      : Error(what), invalid_fraction_(invalid_fraction) {}

  double invalid_fraction() const noexcept { return invalid_fraction_; }

private:
  double invalid_fraction_;
};

class DegenerateAngle : public Error {
public:
  using Error::Error;
};

/// Visibility too low for the quantum curve to cross the Leggett bound.
class NoViolation : public Error {
public:
  using Error::Error;
};

class EmptyTable : public Error {
public:
  using Error::Error;
};

/// Malformed configuration file or command-line flag.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace leggett
