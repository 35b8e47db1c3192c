#pragma once

#include <stdexcept>
#include <string>

namespace arteo {

/// Input dimensionality disagrees with what a kernel or model expects.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(int expected, int got, const std::string& where)
      : std::invalid_argument(where + ": expected dimension " + std::to_string(expected) +
                              ", got " + std::to_string(got)),
        expected_(expected),
        got_(got) {}

  int expected() const { return expected_; }
  int got() const { return got_; }

 private:
  int expected_;
  int got_;
};

/// Numerical failure that survived the configured recovery (e.g. jitter escalation).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem in a config file or an ingested data file. Carries the offending
/// line (0 when the whole file is at fault) and the field/column involved.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& field, const std::string& message)
      : std::runtime_error(format(line, field, message)),
        line_(line),
        field_(field),
        message_(message) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }

 private:
  static std::string format(int line, const std::string& field, const std::string& message) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += field + ": ";
    return out + message;
  }

  int line_;
  std::string field_;
  std::string message_;
};

}  // namespace arteo
