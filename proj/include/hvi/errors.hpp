#pragma once

#include <stdexcept>
#include <string>

namespace hvi {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Two points/values that were expected to live on the same manifold do not.
class ManifoldMismatch : public Error {
 public:
  using Error::Error;
};

/// Two tangent vectors were combined whose base points differ.
class BasePointMismatch : public Error {
 public:
  using Error::Error;
};

/// Geodesic parameter outside [0, 1].
class TOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Malformed construction input (dimension, embedding constraint, ordering of
/// solver constants, negative radius/weight, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NegativeEpsilon : public Error {
 public:
  using Error::Error;
};

class PointNotInSet : public Error {
 public:
  using Error::Error;
};

class InfeasibleSet : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class OracleNotAvailable : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

}  // namespace hvi
