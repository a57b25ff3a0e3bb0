#pragma once

#include <stdexcept>
#include <string>

namespace qclab {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or argument violates a documented precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the natural domain of an operation (e.g. log at 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested on (or a stencil crosses) a map's break set.
class BreakSetError : public Error {
 public:
  using Error::Error;
};

/// The requested combination (variant, gauge, lemma) is not supported.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A quadrature cannot deliver its documented accuracy at this point.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value reached a reduction.
class PropagationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qclab
