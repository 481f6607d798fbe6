#pragma once

#include <stdexcept>
#include <string>

namespace reloop {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A state left the rate-law domain (alpha > 1, 1 + beta*theta <= 0, or
/// the Arrhenius exponent exceeded the overflow cap) during integration.
class IntegrationDomainError : public Error {
public:
  using Error::Error;
};

/// A state or matrix entry became NaN or infinite.
class NonFinite : public Error {
public:
  using Error::Error;
};

/// No period <= k_max recurred within the iteration budget.
class NoPeriodicAttractor : public Error {
public:
  using Error::Error;
};

/// Newton refinement of a periodic orbit failed to converge.
class NewtonDivergence : public Error {
public:
  using Error::Error;
};

/// The bisection bracket does not contain a period change.
class WindowNotBracketed : public Error {
public:
  using Error::Error;
};

/// Fewer than two peaks; no consecutive-peak pairs can be formed.
class TooFewPeaks : public Error {
public:
  using Error::Error;
};

/// Base class for configuration errors (maps to CLI exit status 1).
class ConfigError : public Error {
public:
  using Error::Error;
};

class UnknownKey : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class ParseError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

class InvariantViolation : public ConfigError {
public:
  using ConfigError::ConfigError;
};

} // namespace reloop
