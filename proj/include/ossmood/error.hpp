#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ossmood {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. `offset` is the byte position where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A configuration or lexicon file failed validation. `line` is 1-based, 0 when unknown.
class LoadError : public Error {
 public:
  LoadError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A statistical test, density or histogram is not defined for the given input.
class UndefinedError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// An estimator diverges (e.g. power-law MLE on a point mass).
class DivergentEstimateError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a precondition of the API.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operation called on a corpus of the wrong channel.
class ChannelError : public Error {
 public:
  using Error::Error;
};

/// Event arrived earlier than the last accepted event of the same contributor.
class ReorderError : public Error {
 public:
  using Error::Error;
};

class HttpError : public Error {
 public:
  HttpError(const std::string& what, int status) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Non-fatal problem with a single input record.
struct RecordIssue {
  std::string record;  // message id, bug id or ordinal
  std::string reason;
};

}  // namespace ossmood
