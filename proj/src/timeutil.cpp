#include "timeutil.hpp"

#include <cctype>
#include <cstdio>

#include "errors.hpp"

namespace liketally {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int base[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return base[m - 1];
}

int read_digits(const std::string& s, std::size_t pos, int count, const std::string& module,
                const std::string& what) {
    if (pos + count > s.size())
        raise(errc::parse, module, "timestamp too short while reading " + what + ": '" + s + "'");
    int value = 0;
    for (int i = 0; i < count; ++i) {
        char c = s[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c)))
            raise(errc::parse, module, "invalid " + what + " in timestamp '" + s + "'");
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace

std::int64_t parse_rfc3339(const std::string& s, const std::string& module) {
    // YYYY-MM-DD 'T' HH:MM:SS [.frac] ( 'Z' | ±HH:MM )
    auto expect = [&](std::size_t pos, char c) {
        if (pos >= s.size() || s[pos] != c)
            raise(errc::parse, module,
                  std::string("expected '") + c + "' in timestamp '" + s + "'");
    };
    int year = read_digits(s, 0, 4, module, "year");
    expect(4, '-');
    int month = read_digits(s, 5, 2, module, "month");
    expect(7, '-');
    int day = read_digits(s, 8, 2, module, "day");
    if (s.size() <= 10 || (s[10] != 'T' && s[10] != 't' && s[10] != ' '))
        raise(errc::parse, module, "expected 'T' separator in timestamp '" + s + "'");
    int hour = read_digits(s, 11, 2, module, "hour");
    expect(13, ':');
    int minute = read_digits(s, 14, 2, module, "minute");
    expect(16, ':');
    int second = read_digits(s, 17, 2, module, "second");

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) raise(errc::parse, module, "empty fractional seconds in '" + s + "'");
    }

    std::int64_t offset = 0;
    if (pos >= s.size()) raise(errc::parse, module, "missing timezone in timestamp '" + s + "'");
    char tz = s[pos];
    if (tz == 'Z' || tz == 'z') {
        ++pos;
    } else if (tz == '+' || tz == '-') {
        int oh = read_digits(s, pos + 1, 2, module, "offset hour");
        expect(pos + 3, ':');
        int om = read_digits(s, pos + 4, 2, module, "offset minute");
        offset = (tz == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
        pos += 6;
    } else {
        raise(errc::parse, module, "invalid timezone in timestamp '" + s + "'");
    }
    if (pos != s.size()) raise(errc::parse, module, "trailing characters in timestamp '" + s + "'");

    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) || hour > 23 ||
        minute > 59 || second > 60)
        raise(errc::parse, module, "timestamp field out of range in '" + s + "'");
    if (second == 60) second = 59;  // leap seconds collapse onto :59

    return days_from_civil(year, month, day) * 86400LL + hour * 3600LL + minute * 60LL + second -
           offset;
}

std::string format_rfc3339(std::int64_t t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

UtcDate utc_date_of(std::int64_t t) {
    std::int64_t days = t / 86400;
    if (t % 86400 < 0) --days;
    UtcDate date;
    civil_from_days(days, date.year, date.month, date.day);
    return date;
}

std::string format_date(const UtcDate& date) {
    char buf[12];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", date.year, date.month, date.day);
    return buf;
}

std::int64_t noon_of(const UtcDate& date) {
    return days_from_civil(date.year, date.month, date.day) * 86400LL + 12 * 3600LL;
}

}  // namespace liketally
