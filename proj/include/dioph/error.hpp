#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

// Base of every error raised by the library. Verdicts such as Unresolved are
// values, not errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mathematically invalid argument (non-positive base, alpha outside (0,1)).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed input text or an argument combination the API does not accept.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A PrefixCF was asked for more quotients than it stores.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// A rational expansion ended before the requested tail index.
class UndefinedTailError : public Error {
 public:
  using Error::Error;
};

// A requested series or tail bound does not converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Two independent computations of the same quantity disagree. Always a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// A documented precondition does not hold (caller's responsibility).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dioph
