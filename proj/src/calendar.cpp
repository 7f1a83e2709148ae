#include "heatcast/calendar.hpp"

#include "heatcast/io.hpp"
#include "heatcast/time.hpp"

#include <string>

namespace heatcast {

CalendarDay CalendarDay::on(Date date, bool holiday) {
    return CalendarDay{date, heatcast::is_weekend(date), holiday};
}

Calendar parse_calendar_csv(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++row;
        if (!trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw ParseError("empty calendar: missing header");
    if (trim(line) != "date,is_holiday")
        throw ParseError("expected header 'date,is_holiday'", row);

    std::set<Date> holidays;
    std::set<Date> seen;
    while (std::getline(in, line)) {
        ++row;
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto comma = text.find(',');
        if (comma == std::string_view::npos) throw ParseError("malformed calendar row", row);
        const auto date = parse_date(trim(text.substr(0, comma)));
        if (!date) throw ParseError("malformed date '" + std::string(text.substr(0, comma)) + "'", row);
        const auto flag = trim(text.substr(comma + 1));
        if (flag != "0" && flag != "1") throw ParseError("is_holiday must be 0 or 1", row);
        if (!seen.insert(*date).second) throw ParseError("duplicate date " + format_date(*date), row);
        if (flag == "1") holidays.insert(*date);
    }
    return Calendar(std::move(holidays));
}

void write_calendar_csv(std::ostream& out, const Calendar& calendar, Date first, int days) {
    out << "date,is_holiday\n";
    for (int i = 0; i < days; ++i) {
        const Date d = first + std::chrono::days{i};
        out << format_date(d) << ',' << (calendar.holidays().contains(d) ? 1 : 0) << '\n';
    }
}

}  // namespace heatcast
