#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace smca {

// Error categories map one-to-one onto CLI exit codes (1 usage, 2 validation,
// 3 data).
enum class ErrorCategory { usage = 1, validation = 2, data = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what)
      : Error(ErrorCategory::usage, what) {}
};

// Carries every violated rule, not only the first one found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> rules)
      : Error(ErrorCategory::validation, join(rules)), rules_(std::move(rules)) {}

  const std::vector<std::string>& rules() const noexcept { return rules_; }

  bool has_rule(const std::string& rule) const {
    for (const auto& r : rules_) {
      if (r.rfind(rule, 0) == 0) return true;
    }
    return false;
  }

 private:
  static std::string join(const std::vector<std::string>& rules) {
    std::string out = "invalid configuration: ";
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (i) out += "; ";
      out += rules[i];
    }
    return out;
  }

  std::vector<std::string> rules_;
};

enum class DataErrorKind {
  io,
  header,
  column_count,
  parse,
  checksum,
  too_short,
  gap,
  missing_cells,
  unknown_panel,
};

class DataError : public Error {
 public:
  DataError(DataErrorKind kind, const std::string& what)
      : Error(ErrorCategory::data, what), kind_(kind) {}

  DataErrorKind kind() const noexcept { return kind_; }

 private:
  DataErrorKind kind_;
};

}  // namespace smca
