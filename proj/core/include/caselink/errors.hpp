#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace caselink {

/// Input that does not match its declared format. `line()` is 1-based, 0 when
/// the error is not tied to a particular line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason);
  explicit ParseError(const std::string& reason) : ParseError(0, reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class NotFound : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Conflict : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Unauthorized : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Forbidden : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised by the pipeline; carries the name of the stage that failed.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace caselink
