#pragma once

#include <stdexcept>
#include <string>

namespace wise {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or inconsistent configuration (unknown backend, bad roster, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A backend could not produce a reply (transport failure, quota, replay
// exhaustion) after all retries.
class BackendFailure : public Error {
 public:
  using Error::Error;
};

// Malformed serialized data. Carries the byte offset of the failure when
// known (offset == npos otherwise).
class ParseError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit ParseError(const std::string& what, std::size_t byte_offset = npos)
      : Error(what), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Debate protocol misuse (e.g. follow-up round without prior response).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Index outside the supported option-code range.
class InvalidIndex : public Error {
 public:
  using Error::Error;
};

// Label outside a synthetic agent's class range.
class InvalidLabel : public Error {
 public:
  using Error::Error;
};

// Inputs with incompatible dimensions (mixed K, unknown option code, ...).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// An operation that requires data received none.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

// Majority vote over a set of ballots that are all abstentions.
class NoBallots : public Error {
 public:
  using Error::Error;
};

// Model-judge verdict could not be parsed as yes/no.
class JudgeError : public Error {
 public:
  using Error::Error;
};

// EM produced a non-finite log-likelihood. Must never happen on valid input.
class NonFinite : public Error {
 public:
  using Error::Error;
};

}  // namespace wise
