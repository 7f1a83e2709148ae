#pragma once

#include "heatcast/calendar.hpp"
#include "heatcast/series.hpp"

#include <cstdint>
#include <vector>

namespace heatcast {

/// Parameters of the synthetic district-heating generator. Loads in kW, temperatures in deg C.
struct SynthConfig {
    Date start = Date{std::chrono::year{2015} / 1 / 1};
    int days = 1090;
    double base_load = 3000;
    double daily_amplitude = 400;
    double weekly_weekend_uplift = 0.08;  // fraction of base load added on weekends and holidays
    double annual_amplitude = 1200;
    double temp_mean = 8;
    double temp_annual_amplitude = 8;
    double temp_daily_amplitude = 3;
    double temp_sensitivity = -50;        // kW per deg C of deviation from temp_mean
    double temp_noise_std = 3;            // stationary std of the hourly AR(1) weather anomaly
    double temp_noise_persistence = 0.97; // AR(1) coefficient per hour
    std::vector<Date> holiday_dates;      // empty: Danish public holidays over the range
    double noise_std = 40;
    int glitch_count = 0;                 // negative spikes injected into the accumulated reading
    std::uint64_t seed = 7;

    void validate() const;
};

struct SynthData {
    HourlySeries consumption;  // Rate, kW
    HourlySeries temperature;  // Temperature, deg C
    HourlySeries accumulated;  // meter reading at the start of each hour
    Calendar calendar;
};

/// Consumption values lie on a 1/1024 kW grid so cumulative sums and differences are exact.
SynthData generate(const SynthConfig& cfg);

/// Fixed-date and Easter-based Danish public holidays for every year touching [first, first + days).
std::vector<Date> danish_holidays(Date first, int days);

}  // namespace heatcast
