#pragma once

#include <stdexcept>
#include <string>

namespace dimasr {

/// Base of all errors raised by the pipeline. The subclasses map onto the
/// command-line exit codes (usage = 1, data = 2, runtime = 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flag, bad config value, or a call that violates a precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Failure while running: non-finite loss, transport exhaustion, I/O.
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace dimasr
