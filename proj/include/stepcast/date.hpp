#pragma once

#include <chrono>
#include <cstdio>
#include <string>

#include "stepcast/error.hpp"

namespace stepcast {

/// Parses YYYY-MM-DD; throws ValidationError on anything else.
inline std::chrono::year_month_day parse_iso_date(const std::string& s) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char tail = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
        throw ValidationError("not an ISO-8601 date: '" + s + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw ValidationError("not a calendar date: '" + s + "'");
    return ymd;
}

inline bool is_iso_date(const std::string& s) {
    try {
        parse_iso_date(s);
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

inline std::string format_iso_date(std::chrono::year_month_day ymd) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

inline std::string add_days(const std::string& date, int days) {
    const auto sd = std::chrono::sys_days{parse_iso_date(date)} + std::chrono::days{days};
    return format_iso_date(std::chrono::year_month_day{sd});
}

}  // namespace stepcast
