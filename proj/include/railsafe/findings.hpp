#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace railsafe {

enum class Severity { error, warning };

std::string_view to_string(Severity s);

/// One validation observation. `subject` names what the finding is about
/// (a parameter id for sheets, a node id for nets) and may be empty.
struct Finding {
  std::string subject;
  Severity severity = Severity::error;
  std::string code;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

class ValidationReport {
 public:
  void error(std::string subject, std::string code, std::string message);
  void warning(std::string subject, std::string code, std::string message);
  void append(const ValidationReport& other);

  const std::vector<Finding>& findings() const noexcept { return findings_; }
  std::size_t error_count() const noexcept;
  std::size_t warning_count() const noexcept;
  bool ok() const noexcept { return error_count() == 0; }

  /// Findings sorted by (subject, severity, code, message); used to compare
  /// reports independent of discovery order.
  std::vector<Finding> sorted() const;

 private:
  std::vector<Finding> findings_;
};

}  // namespace railsafe
