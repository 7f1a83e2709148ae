#include "heatcast/time.hpp"

#include <charconv>
#include <cstdio>

namespace heatcast {
namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (text[i] < '0' || text[i] > '9') return false;
    auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return res.ec == std::errc{};
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d))
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    if (text.size() < 19 || text[10] != 'T' || text[13] != ':' || text[16] != ':')
        return std::nullopt;
    const auto date = parse_date(text.substr(0, 10));
    if (!date) return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!read_int(text, 11, 2, hh) || !read_int(text, 14, 2, mm) || !read_int(text, 17, 2, ss))
        return std::nullopt;
    const auto suffix = text.substr(19);
    if (!(suffix.empty() || suffix == "Z" || suffix == "+00:00")) return std::nullopt;
    if (hh > 23 || mm != 0 || ss != 0) return std::nullopt;
    return Timestamp{*date} + std::chrono::hours{hh};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

std::string format_timestamp(Timestamp t) {
    const auto day = date_of(t);
    const auto hour = (t - Timestamp{day}).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:00:00Z", format_date(day).c_str(), int(hour));
    return buf;
}

bool is_weekend(Date d) {
    const std::chrono::weekday wd{d};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

unsigned month_of(Date d) { return unsigned(std::chrono::year_month_day{d}.month()); }

}  // namespace heatcast
