#pragma once

#include <stdexcept>
#include <string>

namespace tubal {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-supplied data violates a precondition (shape, range, format).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents.
class FormatError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A numerical routine failed or produced a result that breaks an invariant
/// (SVD non-convergence, imaginary residue after an inverse transform).
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace tubal
