#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace factgpt {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
/// Time-of-day and timezone are deliberately ignored: date windows are
/// computed over calendar days only.
struct CivilDate {
    std::int32_t days_since_epoch = 0;

    auto operator<=>(const CivilDate&) const = default;
};

/// Absolute distance between two dates in whole calendar days.
std::int64_t days_between(CivilDate a, CivilDate b);

/// Strict "YYYY-MM-DD" with calendar validation (rejects 2021-02-30).
std::optional<CivilDate> parse_iso_date(std::string_view s);

/// Accepts "YYYY-MM-DD" optionally followed by a "T..." or " ..." time part.
/// Only the date component is interpreted.
std::optional<CivilDate> parse_iso_timestamp_date(std::string_view s);

std::string format_iso_date(CivilDate d);

} // namespace factgpt
