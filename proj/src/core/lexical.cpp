#include "semdrought/core/lexical.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace semdrought {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](unsigned char c) { return std::isdigit(c) != 0; });
}

int digits_value(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::string canonical_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("canonical_double: non-finite value");
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  const double mag = std::fabs(value);
  const auto fmt = (mag >= 1e-3 && mag < 1e7) ? std::chars_format::fixed
                                              : std::chars_format::scientific;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, fmt);
  if (ec != std::errc{}) throw std::runtime_error("canonical_double: formatting failed");
  return std::string(buf.data(), end);
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  // from_chars accepts "inf"/"nan"; only plain decimal notation is allowed here.
  for (char c : text) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == 'e' ||
          c == 'E' || c == '+'))
      return std::nullopt;
  }
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(out))
    return std::nullopt;
  return out;
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return out;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{epoch_seconds}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tp - day};
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                int(hms.minutes().count()), int(hms.seconds().count()));
  return buf.data();
}

std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != 'Z')
    return std::nullopt;
  const auto y = s.substr(0, 4), mo = s.substr(5, 2), d = s.substr(8, 2), h = s.substr(11, 2),
             mi = s.substr(14, 2), se = s.substr(17, 2);
  for (auto part : {y, mo, d, h, mi, se})
    if (!all_digits(part)) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{digits_value(y)}, month{unsigned(digits_value(mo))},
                           day{unsigned(digits_value(d))}};
  const int hour = digits_value(h), minute = digits_value(mi), second = digits_value(se);
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) return std::nullopt;
  const auto days_since = sys_days{ymd}.time_since_epoch().count();
  return std::int64_t{days_since} * 86400 + hour * 3600 + minute * 60 + second;
}

std::string_view trim(std::string_view text) noexcept {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

CalendarMonth month_of(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  const auto day = floor<days>(sys_seconds{seconds{epoch_seconds}});
  const year_month_day ymd{day};
  return {int(ymd.year()), unsigned(ymd.month())};
}

std::int64_t month_start(CalendarMonth m) {
  using namespace std::chrono;
  const sys_days d{year{m.year} / month{m.month} / 1};
  return std::int64_t{d.time_since_epoch().count()} * 86400;
}

CalendarMonth next_month(CalendarMonth m) {
  return m.month == 12 ? CalendarMonth{m.year + 1, 1} : CalendarMonth{m.year, m.month + 1};
}

std::optional<CalendarMonth> parse_year_month(std::string_view s) {
  if (s.size() != 7 || s[4] != '-' || !all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)))
    return std::nullopt;
  const int y = digits_value(s.substr(0, 4));
  const int mo = digits_value(s.substr(5, 2));
  if (mo < 1 || mo > 12) return std::nullopt;
  return CalendarMonth{y, unsigned(mo)};
}

std::string format_year_month(CalendarMonth m) {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u", m.year, m.month);
  return buf.data();
}

}  // namespace semdrought
