#pragma once

#include <cstdint>
#include <string>

namespace liketally {

// Calendar date in UTC.
struct UtcDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    friend auto operator<=>(const UtcDate&, const UtcDate&) = default;
};

// Parses an RFC 3339 timestamp ("2015-09-18T12:00:00Z", offsets and
// fractional seconds accepted) into Unix seconds, truncating fractions.
// Throws Error(errc::parse) on malformed input.
std::int64_t parse_rfc3339(const std::string& text, const std::string& module);

// Formats Unix seconds as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(std::int64_t unix_seconds);

UtcDate utc_date_of(std::int64_t unix_seconds);
std::string format_date(const UtcDate& date);

// Unix seconds of 12:00:00Z on the given date.
std::int64_t noon_of(const UtcDate& date);

}  // namespace liketally
