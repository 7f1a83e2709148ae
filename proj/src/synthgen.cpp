#include "heatcast/synthgen.hpp"

#include "heatcast/time.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace heatcast {
namespace {

using namespace std::chrono;

Date easter_sunday(int y) {
    const int a = y % 19, b = y / 100, c = y % 100, d = b / 4, e = b % 4;
    const int f = (b + 8) / 25, g = (b - f + 1) / 3, h = (19 * a + b - d - g + 15) % 30;
    const int i = c / 4, k = c % 4, l = (32 + 2 * e + 2 * i - h - k) % 7;
    const int m = (a + 11 * h + 22 * l) / 451;
    const int month_ = (h + l - 7 * m + 114) / 31, day_ = ((h + l - 7 * m + 114) % 31) + 1;
    return Date{year{y} / month{unsigned(month_)} / day{unsigned(day_)}};
}

constexpr double kGrid = 1024.0;

}  // namespace

void SynthConfig::validate() const {
    if (days < 1) throw ConfigError("synthetic days must be at least 1");
    if (!(noise_std >= 0) || !(temp_noise_std >= 0)) throw ConfigError("noise std must be non-negative");
    if (!(temp_noise_persistence >= 0 && temp_noise_persistence < 1))
        throw ConfigError("temperature noise persistence must lie in [0, 1)");
    if (glitch_count < 0) throw ConfigError("glitch count must be non-negative");
    if (!std::isfinite(base_load) || !std::isfinite(daily_amplitude) || !std::isfinite(annual_amplitude) ||
        !std::isfinite(weekly_weekend_uplift) || !std::isfinite(temp_sensitivity) || !std::isfinite(temp_mean))
        throw ConfigError("synthetic parameters must be finite");
}

std::vector<Date> danish_holidays(Date first, int days) {
    const Date last = first + std::chrono::days{days};
    const int y0 = int(year_month_day{first}.year()), y1 = int(year_month_day{last}.year());
    std::vector<Date> out;
    for (int y = y0; y <= y1; ++y) {
        const Date easter = easter_sunday(y);
        for (Date d : {Date{year{y} / January / 1}, easter - std::chrono::days{3}, easter - std::chrono::days{2},
                       easter + std::chrono::days{1}, easter + std::chrono::days{39}, easter + std::chrono::days{50},
                       Date{year{y} / June / 5}, Date{year{y} / December / 24}, Date{year{y} / December / 25},
                       Date{year{y} / December / 26}})
            if (d >= first && d < last) out.push_back(d);
        // Great Prayer Day, abolished from 2024.
        if (const Date prayer = easter + std::chrono::days{26}; y < 2024 && prayer >= first && prayer < last)
            out.push_back(prayer);
    }
    std::sort(out.begin(), out.end());
    return out;
}

SynthData generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto holidays = cfg.holiday_dates.empty() ? danish_holidays(cfg.start, cfg.days) : cfg.holiday_dates;
    Calendar calendar(std::set<Date>(holidays.begin(), holidays.end()));

    const Index n = Index(cfg.days) * 24;
    VectorXd temp(n), load(n);
    const double two_pi = 2.0 * std::numbers::pi;
    const double innovation = cfg.temp_noise_std * std::sqrt(1.0 - cfg.temp_noise_persistence * cfg.temp_noise_persistence);
    double anomaly = cfg.temp_noise_std * gauss(rng);
    for (Index t = 0; t < n; ++t) {
        const Date day = cfg.start + std::chrono::days{t / 24};
        const double hour = double(t % 24);
        const double doy = double((day - Date{year_month_day{day}.year() / January / 1}).count());
        const double annual = std::cos(two_pi * (doy - 15.0) / 365.25);  // peaks mid-January
        if (t > 0) anomaly = cfg.temp_noise_persistence * anomaly + innovation * gauss(rng);

        temp[t] = cfg.temp_mean - cfg.temp_annual_amplitude * annual +
                  cfg.temp_daily_amplitude * std::cos(two_pi * (hour - 15.0) / 24.0) + anomaly;

        double value = cfg.base_load + cfg.daily_amplitude * std::cos(two_pi * (hour - 7.0) / 24.0) +
                       cfg.annual_amplitude * annual + cfg.temp_sensitivity * (temp[t] - cfg.temp_mean);
        if (calendar.day(day).is_off_day()) value += cfg.weekly_weekend_uplift * cfg.base_load;
        value += cfg.noise_std * gauss(rng);
        load[t] = std::round(std::max(0.0, value) * kGrid) / kGrid;
    }

    VectorXd acc(n);
    double running = 0;
    for (Index t = 0; t < n; ++t) {
        acc[t] = running;
        running += load[t];
    }
    if (cfg.glitch_count > 0 && n > 2) {
        std::uniform_int_distribution<Index> where(1, n - 2);
        for (int g = 0; g < cfg.glitch_count; ++g) acc[where(rng)] -= 5.0 * cfg.base_load + 1.0;
    }

    const Timestamp start{cfg.start};
    return SynthData{HourlySeries(start, SeriesKind::Rate, std::move(load)),
                     HourlySeries(start, SeriesKind::Temperature, std::move(temp)),
                     HourlySeries(start, SeriesKind::Accumulated, std::move(acc)), std::move(calendar)};
}

}  // namespace heatcast
