#pragma once

#include <stdexcept>
#include <string>

namespace qnetsim {

// Register labeling problems: duplicate labels, unknown labels.
class LabelError : public std::invalid_argument {
 public:
  explicit LabelError(const std::string& what) : std::invalid_argument(what) {}
};

// Operator/state dimension mismatches.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Violated physical invariants (non-Hermitian state, incomplete Kraus set, ...).
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

// Config file problems; carries enough context for a line/field diagnostic.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : std::runtime_error(format(what, line, field)), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& what, int line, const std::string& field) {
    std::string msg = "config error";
    if (line > 0) msg += " at line " + std::to_string(line);
    if (!field.empty()) msg += " (field '" + field + "')";
    return msg + ": " + what;
  }
  int line_;
  std::string field_;
};

}  // namespace qnetsim
