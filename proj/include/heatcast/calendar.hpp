#pragma once

#include "heatcast/core.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <vector>

namespace heatcast {

struct CalendarDay {
    Date date;
    bool is_weekend = false;
    bool is_holiday = false;

    /// Weekend is derived from the date itself.
    static CalendarDay on(Date date, bool holiday = false);

    bool is_off_day() const noexcept { return is_weekend || is_holiday; }

    friend bool operator==(const CalendarDay&, const CalendarDay&) = default;
};

/// Set of holiday dates; lookups fall back to "not a holiday".
class Calendar {
public:
    Calendar() = default;
    explicit Calendar(std::set<Date> holidays) : holidays_(std::move(holidays)) {}

    CalendarDay day(Date d) const { return CalendarDay::on(d, holidays_.contains(d)); }
    const std::set<Date>& holidays() const noexcept { return holidays_; }

private:
    std::set<Date> holidays_;
};

/// Reads `date,is_holiday` CSV with is_holiday in {0, 1}.
Calendar parse_calendar_csv(std::istream& in);

/// Writes one row per day in [first, first + days).
void write_calendar_csv(std::ostream& out, const Calendar& calendar, Date first, int days);

}  // namespace heatcast
