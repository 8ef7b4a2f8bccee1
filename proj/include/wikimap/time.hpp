#pragma once

// UTC timestamps at second resolution, stored as seconds since the Unix
// epoch. Civil-date conversion is done with proleptic-Gregorian arithmetic
// so results do not depend on the host timezone database.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace wikimap {

using Timestamp = std::int64_t;

// 2001-01-15T00:00:00Z; no page in the corpus can predate the wiki itself.
inline constexpr Timestamp kWikiEpoch = 979516800;

struct CivilTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

namespace timedetail {

inline constexpr std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline constexpr void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yy + (m <= 2));
}

inline bool parse_digits(std::string_view s, int& out) {
    if (s.empty()) return false;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace timedetail

inline Timestamp timestamp_from_civil(const CivilTime& c) {
    return timedetail::days_from_civil(c.year, c.month, c.day) * 86400 +
           c.hour * 3600 + c.minute * 60 + c.second;
}

inline CivilTime civil_from_timestamp(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    CivilTime c;
    timedetail::civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(rem / 3600);
    c.minute = static_cast<int>((rem / 60) % 60);
    c.second = static_cast<int>(rem % 60);
    return c;
}

inline bool civil_fields_valid(const CivilTime& c) {
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31) return false;
    if (c.hour > 23 || c.hour < 0 || c.minute > 59 || c.minute < 0) return false;
    if (c.second > 60 || c.second < 0) return false;  // tolerate leap-second stamps
    return true;
}

// "2005-11-05T12:34:56Z"
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
    using timedetail::parse_digits;
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' ||
        s[13] != ':' || s[16] != ':' || s[19] != 'Z')
        return std::nullopt;
    CivilTime c;
    if (!parse_digits(s.substr(0, 4), c.year) || !parse_digits(s.substr(5, 2), c.month) ||
        !parse_digits(s.substr(8, 2), c.day) || !parse_digits(s.substr(11, 2), c.hour) ||
        !parse_digits(s.substr(14, 2), c.minute) || !parse_digits(s.substr(17, 2), c.second))
        return std::nullopt;
    if (!civil_fields_valid(c)) return std::nullopt;
    return timestamp_from_civil(c);
}

// "20051105123456", the MySQL dump timestamp form.
inline std::optional<Timestamp> parse_compact14(std::string_view s) {
    using timedetail::parse_digits;
    if (s.size() != 14) return std::nullopt;
    CivilTime c;
    if (!parse_digits(s.substr(0, 4), c.year) || !parse_digits(s.substr(4, 2), c.month) ||
        !parse_digits(s.substr(6, 2), c.day) || !parse_digits(s.substr(8, 2), c.hour) ||
        !parse_digits(s.substr(10, 2), c.minute) || !parse_digits(s.substr(12, 2), c.second))
        return std::nullopt;
    if (c.year == 0 || !civil_fields_valid(c)) return std::nullopt;
    return timestamp_from_civil(c);
}

inline std::string format_iso8601(Timestamp t) {
    const CivilTime c = civil_from_timestamp(t);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day,
                  c.hour, c.minute, c.second);
    return buf;
}

// Months counted from year 0 so consecutive calendar months differ by one.
inline int month_index(Timestamp t) {
    const CivilTime c = civil_from_timestamp(t);
    return c.year * 12 + (c.month - 1);
}

inline std::string format_month(int month_idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", month_idx / 12, month_idx % 12 + 1);
    return buf;
}

}  // namespace wikimap
