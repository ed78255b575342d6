#include "caselink/errors.hpp"

namespace caselink {

namespace {
std::string format_parse_error(std::size_t line, const std::string& reason) {
  if (line == 0) return reason;
  return "line " + std::to_string(line) + ": " + reason;
}
}  // namespace

ParseError::ParseError(std::size_t line, const std::string& reason)
    : std::runtime_error(format_parse_error(line, reason)), line_(line), reason_(reason) {}

StageError::StageError(std::string stage, const std::string& cause)
    : std::runtime_error(stage + ": " + cause), stage_(std::move(stage)) {}

}  // namespace caselink
