#pragma once

#include <stdexcept>
#include <string>

namespace narr {

/// Broad failure categories; the CLI maps each onto a process exit code.
enum class ErrorKind {
  Validation,  ///< input violates a documented invariant
  Parse,       ///< malformed file contents
  Io,          ///< filesystem failure
  Degenerate,  ///< statistic undefined for the given data (zero variance, ...)
  MissingInput ///< a measure's required inputs are absent from the trace
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(ErrorKind::Degenerate, what) {}
};

class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& what) : Error(ErrorKind::MissingInput, what) {}
};

}  // namespace narr
