#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace railsafe::text {

/// ASCII case folding; bytes outside ASCII compare as-is.
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::string_view trim(std::string_view s);

std::optional<long long> parse_int(std::string_view s);

using Timestamp = std::chrono::sys_seconds;

/// RFC 3339 UTC with second precision, e.g. `2026-10-19T08:30:00Z`.
std::string format_rfc3339(Timestamp t);
/// Accepts `YYYY-MM-DDTHH:MM:SSZ` (also a `+00:00` suffix); nullopt otherwise.
std::optional<Timestamp> parse_rfc3339(std::string_view s);
Timestamp now_utc();

std::string read_file(const std::string& path);
/// Writes a sibling temporary, fsyncs it, then renames it over `dest`.
void write_file_atomic(const std::filesystem::path& dest, const std::string& content);

}  // namespace railsafe::text
