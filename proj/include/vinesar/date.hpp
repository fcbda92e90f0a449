#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace vinesar {

/// Calendar date; all acquisition and weather timestamps are whole days.
using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 calendar date ("YYYY-MM-DD"). Throws std::invalid_argument.
Date parse_date(std::string_view text);

std::string format_date(Date d);

/// 1-based day of the year.
int day_of_year(Date d);

/// Signed number of days from `from` to `to`.
int days_between(Date from, Date to);

Date add_days(Date d, int n);

/// Three-letter English month tag ("Jan".."Dec").
std::string_view month_tag(Date d);

}  // namespace vinesar
