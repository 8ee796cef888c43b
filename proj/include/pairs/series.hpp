#pragma once

#include <chrono>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pairs/error.hpp"

namespace pairs {

using Date = std::chrono::sys_days;
using YearMonth = std::chrono::year_month;

/// Parses an ISO `YYYY-MM-DD` date. Returns false on malformed or invalid input.
inline bool try_parse_date(std::string_view text, Date& out) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    int y = 0;
    unsigned m = 0, d = 0;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    y = std::stoi(std::string(text.substr(0, 4)));
    m = static_cast<unsigned>(std::stoi(std::string(text.substr(5, 2))));
    d = static_cast<unsigned>(std::stoi(std::string(text.substr(8, 2))));
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) return false;
    out = Date{ymd};
    return true;
}

inline Date parse_date(std::string_view text) {
    Date out;
    if (!try_parse_date(text, out)) fail(ErrorCode::Parse, "invalid date '" + std::string(text) + "'");
    return out;
}

inline std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline bool try_parse_month(std::string_view text, YearMonth& out) {
    if (text.size() != 7 || text[4] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u}) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    const int y = std::stoi(std::string(text.substr(0, 4)));
    const unsigned m = static_cast<unsigned>(std::stoi(std::string(text.substr(5, 2))));
    const YearMonth ym{std::chrono::year{y}, std::chrono::month{m}};
    if (!ym.ok()) return false;
    out = ym;
    return true;
}

inline YearMonth parse_month(std::string_view text) {
    YearMonth out;
    if (!try_parse_month(text, out)) fail(ErrorCode::Parse, "invalid month '" + std::string(text) + "'");
    return out;
}

inline std::string format_month(YearMonth ym) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ym.year()),
                  static_cast<unsigned>(ym.month()));
    return buf;
}

inline YearMonth month_of(Date date) {
    const std::chrono::year_month_day ymd{date};
    return YearMonth{ymd.year(), ymd.month()};
}

/// A daily series of real values keyed by strictly ascending dates.
struct DatedSeries {
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
};

/// Monthly observations; months are strictly ascending and contiguous.
struct MonthlySeries {
    std::vector<YearMonth> months;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
};

/// Weekday calendar starting at `start` (weekends skipped).
inline std::vector<Date> business_days(Date start, std::size_t count) {
    std::vector<Date> out;
    out.reserve(count);
    Date d = start;
    while (out.size() < count) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
        d += std::chrono::days{1};
    }
    return out;
}

/// Formats a double so that parsing it back yields the identical value.
inline std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace pairs
