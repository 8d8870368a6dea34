#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace railsafe {

enum class ErrorCode {
  parse_error,
  consistency_error,
  unknown_concept,
  missing_anchor,
  schema_mismatch,
  unknown_place,
  unknown_transition,
  not_enabled,
  invalid_bound,
  storage_error,
  id_conflict,
  not_found,
  invariant_violation,
  syntax_error,
  unknown_parameter,
};

/// Stable machine-readable name, used on the wire and in CLI JSON output.
std::string_view to_string(ErrorCode code);

struct SourcePosition {
  std::size_t line = 0;
  std::size_t column = 0;

  friend bool operator==(const SourcePosition&, const SourcePosition&) = default;
};

/// Every failure raised by the library. `details` carries the full list of
/// violations when an operation collects them instead of stopping at the first.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::vector<std::string> details = {},
        std::optional<SourcePosition> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }
  const std::optional<SourcePosition>& position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
  std::optional<SourcePosition> position_;
};

}  // namespace railsafe
