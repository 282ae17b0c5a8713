#pragma once

#include <cstdint>
#include <string>

#include "fpr/error.hpp"

namespace fpr {

/// Calendar date as days since 1970-01-01, ordered and arithmetic-friendly.
struct Date {
  std::int64_t days = 0;

  auto operator<=>(const Date&) const = default;

  Date operator+(std::int64_t d) const { return Date{days + d}; }
  std::int64_t operator-(const Date& other) const { return days - other.days; }
};

/// Parses "YYYY-MM-DD"; throws FormatError on anything else.
Date parse_date(const std::string& iso);

/// Formats as "YYYY-MM-DD".
std::string format_date(const Date& date);

}  // namespace fpr
