#pragma once

#include "heatcast/core.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace heatcast {

/// Parses `YYYY-MM-DDTHH:MM:SS` with an optional `Z` or `+00:00` suffix.
/// Returns nullopt when the text is malformed or not hour-aligned.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// `YYYY-MM-DD`.
std::optional<Date> parse_date(std::string_view text);

std::string format_timestamp(Timestamp t);  // 2017-01-01T00:00:00Z
std::string format_date(Date d);            // 2017-01-01

inline Date date_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

inline bool is_midnight(Timestamp t) { return Timestamp{date_of(t)} == t; }

bool is_weekend(Date d);

/// 1..12
unsigned month_of(Date d);

}  // namespace heatcast
