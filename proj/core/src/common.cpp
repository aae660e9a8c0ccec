#include "stylelens/common.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace stylelens {

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap_year(year)) return 29;
  return kDays[month - 1];
}

Date::Date(int year, int month, int day) : year_(year), month_(month), day_(day) {
  if (year < 1 || year > 9999 || month < 1 || month > 12 || day < 1 ||
      day > days_in_month(year, month)) {
    throw ValidationError("invalid date " + std::to_string(year) + "-" + std::to_string(month) +
                          "-" + std::to_string(day));
  }
}

std::optional<Date> Date::try_parse(std::string_view iso) {
  iso = trim(iso);
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(iso.substr(0, 4), y) || !parse_int(iso.substr(5, 2), m) ||
      !parse_int(iso.substr(8, 2), d)) {
    return std::nullopt;
  }
  if (y < 1 || m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  return Date(y, m, d);
}

Date Date::parse(std::string_view iso) {
  auto d = try_parse(iso);
  if (!d) throw ValidationError("invalid ISO-8601 date '" + std::string(iso) + "'");
  return *d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year_, month_, day_);
  return buf;
}

Month::Month(int year, int month) : year_(year), month_(month) {
  if (year < 1 || year > 9999 || month < 1 || month > 12) {
    throw ValidationError("invalid month " + std::to_string(year) + "-" + std::to_string(month));
  }
}

Month Month::parse(std::string_view key) {
  key = trim(key);
  int y = 0, m = 0;
  if (key.size() != 7 || key[4] != '-' || !parse_int(key.substr(0, 4), y) ||
      !parse_int(key.substr(5, 2), m) || m < 1 || m > 12 || y < 1) {
    throw ValidationError("invalid month key '" + std::string(key) + "' (expected YYYY-MM)");
  }
  return Month(y, m);
}

Month Month::from_ordinal(int ordinal) { return Month(ordinal / 12, ordinal % 12 + 1); }

std::string Month::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year_, month_);
  return buf;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace stylelens
