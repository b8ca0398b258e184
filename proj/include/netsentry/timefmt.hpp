#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace netsentry {

// Civil <-> epoch conversions (proleptic Gregorian, UTC). Log timestamps must
// not depend on the host timezone, so std::localtime is off the table.

inline std::int64_t days_from_civil(int y, unsigned m, unsigned d)
{
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d)
{
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

// "YYYY-MM-DD HH:MM:SS"
inline std::string format_ts(std::int64_t epoch_sec)
{
    std::int64_t days = epoch_sec / 86400;
    std::int64_t rem = epoch_sec % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02lld:%02lld:%02lld", y, m, d,
        static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
        static_cast<long long>(rem % 60));
    return buf;
}

// Same, with millisecond suffix, for sub-second bin starts.
inline std::string format_ts_ms(std::int64_t epoch_us)
{
    std::int64_t sec = epoch_us / 1000000;
    std::int64_t us = epoch_us % 1000000;
    if (us < 0) {
        us += 1000000;
        --sec;
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), ".%03lld", static_cast<long long>(us / 1000));
    return format_ts(sec) + buf;
}

inline std::optional<std::int64_t> parse_ts(std::string_view s)
{
    // strict "YYYY-MM-DD HH:MM:SS"
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != ' ' || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    auto num = [&](std::size_t off, std::size_t len, int& out) -> bool {
        out = 0;
        for (std::size_t i = off; i < off + len; ++i) {
            if (s[i] < '0' || s[i] > '9')
                return false;
            out = out * 10 + (s[i] - '0');
        }
        return true;
    };
    int y, mo, d, h, mi, se;
    if (!num(0, 4, y) || !num(5, 2, mo) || !num(8, 2, d) || !num(11, 2, h) || !num(14, 2, mi) ||
        !num(17, 2, se))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 59)
        return std::nullopt;
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
           h * 3600 + mi * 60 + se;
}

} // namespace netsentry
