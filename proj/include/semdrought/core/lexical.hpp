#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace semdrought {

/// Shortest text that parses back to exactly `value`. Zero (either sign) is
/// "0"; magnitudes in [1e-3, 1e7) never use an exponent, others use the
/// shortest scientific form. `value` must be finite.
std::string canonical_double(double value);

/// Strict decimal parse of the whole string; rejects nan/inf, hex and
/// leading/trailing garbage. Leading '+' is accepted.
std::optional<double> parse_double(std::string_view text);

std::optional<std::int64_t> parse_integer(std::string_view text);

/// Epoch seconds (UTC) to "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(std::int64_t epoch_seconds);

/// Parses "YYYY-MM-DDTHH:MM:SSZ" exactly. Fractional seconds, offsets other
/// than "Z" and out-of-range calendar fields are rejected.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

std::string_view trim(std::string_view text) noexcept;
std::string to_lower(std::string_view text);

struct CalendarMonth {
  int year = 1970;
  unsigned month = 1;  // 1..12

  friend auto operator<=>(const CalendarMonth&, const CalendarMonth&) = default;
};

CalendarMonth month_of(std::int64_t epoch_seconds);
/// First second of the month.
std::int64_t month_start(CalendarMonth m);
CalendarMonth next_month(CalendarMonth m);
/// "YYYY-MM"
std::optional<CalendarMonth> parse_year_month(std::string_view text);
std::string format_year_month(CalendarMonth m);

}  // namespace semdrought
