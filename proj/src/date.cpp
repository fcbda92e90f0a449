#include "vinesar/date.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace vinesar {

namespace {

int parse_field(std::string_view text, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("invalid date: '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument("invalid date: '" + std::string(text) + "'");
    }
    const int y = parse_field(text.substr(0, 4), text);
    const int m = parse_field(text.substr(5, 2), text);
    const int d = parse_field(text.substr(8, 2), text);
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) {
        throw std::invalid_argument("invalid date: '" + std::string(text) + "'");
    }
    return date;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

int day_of_year(Date d) {
    using namespace std::chrono;
    const sys_days jan1{d.year() / January / 1};
    return static_cast<int>((sys_days{d} - jan1).count()) + 1;
}

int days_between(Date from, Date to) {
    using std::chrono::sys_days;
    return static_cast<int>((sys_days{to} - sys_days{from}).count());
}

Date add_days(Date d, int n) {
    using std::chrono::sys_days;
    return Date{sys_days{d} + std::chrono::days{n}};
}

std::string_view month_tag(Date d) {
    static constexpr std::array<std::string_view, 12> kTags{
        "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    return kTags[static_cast<unsigned>(d.month()) - 1];
}

}  // namespace vinesar
