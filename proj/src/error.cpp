#include "railsafe/error.hpp"

#include <algorithm>
#include <tuple>

#include "railsafe/findings.hpp"

namespace railsafe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::consistency_error: return "consistency-error";
    case ErrorCode::unknown_concept: return "unknown-concept";
    case ErrorCode::missing_anchor: return "missing-anchor";
    case ErrorCode::schema_mismatch: return "schema-mismatch";
    case ErrorCode::unknown_place: return "unknown-place";
    case ErrorCode::unknown_transition: return "unknown-transition";
    case ErrorCode::not_enabled: return "not-enabled";
    case ErrorCode::invalid_bound: return "invalid-bound";
    case ErrorCode::storage_error: return "storage-error";
    case ErrorCode::id_conflict: return "id-conflict";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::invariant_violation: return "invariant-violation";
    case ErrorCode::syntax_error: return "syntax-error";
    case ErrorCode::unknown_parameter: return "unknown-parameter";
  }
  return "unknown";
}

namespace {

std::string with_position(std::string message, const std::optional<SourcePosition>& pos) {
  if (pos) {
    message += " (line " + std::to_string(pos->line) + ", column " + std::to_string(pos->column) + ")";
  }
  return message;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::vector<std::string> details,
             std::optional<SourcePosition> position)
    : std::runtime_error(with_position(std::move(message), position)),
      code_(code),
      details_(std::move(details)),
      position_(position) {}

std::string_view to_string(Severity s) {
  return s == Severity::error ? "error" : "warning";
}

void ValidationReport::error(std::string subject, std::string code, std::string message) {
  findings_.push_back({std::move(subject), Severity::error, std::move(code), std::move(message)});
}

void ValidationReport::warning(std::string subject, std::string code, std::string message) {
  findings_.push_back({std::move(subject), Severity::warning, std::move(code), std::move(message)});
}

void ValidationReport::append(const ValidationReport& other) {
  findings_.insert(findings_.end(), other.findings_.begin(), other.findings_.end());
}

std::size_t ValidationReport::error_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(findings_.begin(), findings_.end(),
                                                [](const Finding& f) { return f.severity == Severity::error; }));
}

std::size_t ValidationReport::warning_count() const noexcept {
  return findings_.size() - error_count();
}

std::vector<Finding> ValidationReport::sorted() const {
  auto out = findings_;
  std::sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.subject, a.severity, a.code, a.message) <
           std::tie(b.subject, b.severity, b.code, b.message);
  });
  return out;
}

}  // namespace railsafe
