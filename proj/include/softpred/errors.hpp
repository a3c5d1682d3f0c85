#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace softpred {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad shapes, bad parameters,
/// rows with no observed entries, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// Malformed external data (ragged CSV rows, unparseable numbers).
struct FormatError : Error {
  using Error::Error;
};

/// Filesystem-level failure.
struct IoError : Error {
  using Error::Error;
};

/// A least-squares system is numerically rank deficient and the
/// pseudo-inverse fallback was not requested.
struct SingularSystemError : Error {
  SingularSystemError(const std::string& what, std::int64_t rank_, std::int64_t needed_)
      : Error(what), rank(rank_), needed(needed_) {}

  std::int64_t rank;    ///< estimated numerical rank
  std::int64_t needed;  ///< rank required for a unique solution
};

}  // namespace softpred
