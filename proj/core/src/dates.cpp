#include "factgpt/dates.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace factgpt {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

} // namespace

std::int64_t days_between(CivilDate a, CivilDate b) {
    return std::llabs(static_cast<std::int64_t>(a.days_since_epoch) -
                      static_cast<std::int64_t>(b.days_since_epoch));
}

std::optional<CivilDate> parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) ||
        !parse_int(s.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) return std::nullopt;
    const std::chrono::sys_days sd{ymd};
    return CivilDate{static_cast<std::int32_t>(sd.time_since_epoch().count())};
}

std::optional<CivilDate> parse_iso_timestamp_date(std::string_view s) {
    if (s.size() < 10) return std::nullopt;
    if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
    return parse_iso_date(s.substr(0, 10));
}

std::string format_iso_date(CivilDate d) {
    const std::chrono::sys_days sd{std::chrono::days{d.days_since_epoch}};
    const std::chrono::year_month_day ymd{sd};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

} // namespace factgpt
