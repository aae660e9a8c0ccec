#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stylelens {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a documented contract (bad record, bad argument).
/// The CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Calendar date, validated on construction. Serialized as ISO-8601 YYYY-MM-DD.
class Date {
 public:
  Date() = default;
  Date(int year, int month, int day);

  static Date parse(std::string_view iso);
  static std::optional<Date> try_parse(std::string_view iso);

  int year() const { return year_; }
  int month() const { return month_; }
  int day() const { return day_; }

  std::string to_string() const;

  auto operator<=>(const Date&) const = default;

 private:
  int year_ = 1970;
  int month_ = 1;
  int day_ = 1;
};

/// Year-month key used by every monthly series (YYYY-MM).
class Month {
 public:
  Month() = default;
  Month(int year, int month);
  explicit Month(const Date& d) : Month(d.year(), d.month()) {}

  static Month parse(std::string_view key);

  int year() const { return year_; }
  int month() const { return month_; }

  /// Months since year 0; consecutive months differ by one.
  int ordinal() const { return year_ * 12 + (month_ - 1); }
  static Month from_ordinal(int ordinal);
  Month next() const { return from_ordinal(ordinal() + 1); }

  std::string to_string() const;

  auto operator<=>(const Month&) const = default;

 private:
  int year_ = 1970;
  int month_ = 1;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

/// ASCII lowercase copy; bytes >= 0x80 are left alone.
std::string ascii_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace stylelens
