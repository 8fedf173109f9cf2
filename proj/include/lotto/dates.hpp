#pragma once

#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

namespace lotto {

/// Calendar date. Only parsed, compared and range-checked; there is no
/// time-series modeling anywhere in the pipeline.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    bool valid() const {
        if (year < 1900 || year > 2100 || month < 1 || month > 12 || day < 1) return false;
        static constexpr int dim[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        int d = dim[month - 1];
        if (month == 2 && (year % 4 == 0 && (year % 100 != 0 || year % 400 == 0))) d = 29;
        return day <= d;
    }

    std::string iso() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    /// Days since 1970-01-01 (civil-calendar algorithm).
    long to_days() const {
        long y = year;
        unsigned m = static_cast<unsigned>(month), d = static_cast<unsigned>(day);
        y -= m <= 2;
        const long era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + static_cast<long>(doe) - 719468;
    }

    static Date from_days(long z) {
        z += 719468;
        const long era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const long y = static_cast<long>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
    }
};

/// Accepts ISO "YYYY-MM-DD" and US "M/D/YYYY" forms.
inline bool try_parse_date(std::string_view text, Date& out) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    int a = 0, b = 0, c = 0;
    char sep1 = 0, sep2 = 0;
    int consumed = 0;
    std::string s(text);
    if (std::sscanf(s.c_str(), "%d%c%d%c%d%n", &a, &sep1, &b, &sep2, &c, &consumed) != 5) return false;
    if (static_cast<std::size_t>(consumed) != s.size()) return false;
    if (sep1 != sep2) return false;
    Date d;
    if (sep1 == '-') d = Date{a, b, c};
    else if (sep1 == '/') d = Date{c, a, b};
    else return false;
    if (!d.valid()) return false;
    out = d;
    return true;
}

} // namespace lotto
