#pragma once

#include <stdexcept>
#include <string>

namespace chroma {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user/environment configuration (missing API key, corrupt embedded data).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed caller input (bad hex string, empty concept, size mismatch).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A backend response that carries no usable rating.
class RatingParseError : public Error {
 public:
  using Error::Error;
};

// Network / HTTP failure talking to a chat-completion endpoint.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& msg, bool retryable = true)
      : Error(msg), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

// Backend received a prompt that does not match the expected template.
class ProtocolViolationError : public Error {
 public:
  using Error::Error;
};

// One or more colors ended a run with no successfully parsed rating.
class IncompleteDistributionError : public Error {
 public:
  using Error::Error;
};

// Statistic undefined for the given input (constant vector, r = -1, ...).
class UndefinedStatisticError : public Error {
 public:
  using Error::Error;
};

// Design matrix not of full column rank.
class SingularDesignError : public Error {
 public:
  using Error::Error;
};

// File contents violate the declared schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Grid generation produced no colors.
class EmptyLibraryError : public Error {
 public:
  using Error::Error;
};

}  // namespace chroma
