#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace lotto {

// All recorded money is held as integer cents so sums stay exact.
using Cents = std::int64_t;

// Model expectations (which are not integer amounts of money) use
// micro-dollars so that sums, differences and break-even comparisons
// are still exact integer arithmetic.
using Micros = std::int64_t;

constexpr Micros kMicrosPerDollar = 1'000'000;
constexpr Micros kMicrosPerCent = 10'000;

inline double cents_to_dollars(Cents c) { return static_cast<double>(c) / 100.0; }
inline double micros_to_dollars(Micros m) { return static_cast<double>(m) / 1e6; }
inline Micros cents_to_micros(Cents c) { return c * kMicrosPerCent; }

/// Parse a dollar amount ("1234.5", "$1,234.56", "700") into cents.
/// Accepts an optional leading $, thousands separators, and at most
/// two decimal places. Returns false on anything else.
inline bool try_parse_usd(std::string_view text, Cents& out) {
    // strip surrounding whitespace
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return false;

    bool negative = false;
    if (text.front() == '-') { negative = true; text.remove_prefix(1); }
    if (!text.empty() && text.front() == '$') text.remove_prefix(1);
    if (text.empty()) return false;

    Cents whole = 0;
    bool any_digit = false;
    std::size_t i = 0;
    for (; i < text.size(); ++i) {
        char ch = text[i];
        if (ch >= '0' && ch <= '9') {
            whole = whole * 10 + (ch - '0');
            any_digit = true;
            if (whole > 1'000'000'000'000LL) return false; // $10B guard
        } else if (ch == ',') {
            continue;
        } else if (ch == '.') {
            break;
        } else {
            return false;
        }
    }
    Cents frac = 0;
    if (i < text.size()) { // at the '.'
        ++i;
        int places = 0;
        for (; i < text.size(); ++i, ++places) {
            char ch = text[i];
            if (ch < '0' || ch > '9' || places >= 2) return false;
            frac = frac * 10 + (ch - '0');
        }
        if (places == 0) return false;
        if (places == 1) frac *= 10;
    }
    if (!any_digit) return false;
    out = whole * 100 + frac;
    if (negative) out = -out;
    return true;
}

/// Format cents as a plain decimal dollar string, e.g. -360 -> "-3.60".
inline std::string format_usd(Cents c) {
    char buf[40];
    Cents a = c < 0 ? -c : c;
    std::snprintf(buf, sizeof buf, "%s%lld.%02lld", c < 0 ? "-" : "",
                  static_cast<long long>(a / 100), static_cast<long long>(a % 100));
    return buf;
}

/// Nearest-thousand dollar rounding used only when rendering report tables.
inline long long round_to_thousands(double dollars) {
    return std::llround(dollars / 1000.0);
}

} // namespace lotto
