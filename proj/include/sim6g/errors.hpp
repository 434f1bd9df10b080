#pragma once

#include <stdexcept>
#include <string>

namespace sim6g {

/// Base of every error raised by the toolkit. Each subclass maps to one
/// error category used by the CLI exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong lengths, bad hex, invariant-violating bodies.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Value cannot be brought into canonical form (floats, duplicate keys).
class CanonicalizationError : public InputError {
 public:
  using InputError::InputError;
};

/// Signer is not allowed to perform the requested mutation.
class AuthorizationError : public Error {
 public:
  using Error::Error;
};

/// Operation is not valid in the current lifecycle state (e.g. deactivated).
class LifecycleError : public Error {
 public:
  using Error::Error;
};

/// Duplicate creation or repeated revocation.
class ConflictError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Scenario or run configuration does not satisfy its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sim6g
