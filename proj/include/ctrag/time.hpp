#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ctrag {

using Timestamp = std::chrono::sys_seconds;

/// Formats as RFC 3339 in UTC with a literal `Z`, e.g. `2023-12-07T11:18:19Z`.
std::string format_rfc3339(Timestamp t);

/// Accepts `YYYY-MM-DDTHH:MM:SS` followed by `Z` or a `+HH:MM`/`-HH:MM` offset,
/// with optional fractional seconds (truncated). Returns nullopt on anything else.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// `YYYY-MM-DD` of the UTC calendar day.
std::string format_date(Timestamp t);

int hour_of_day(Timestamp t);

}  // namespace ctrag
