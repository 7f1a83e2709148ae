#pragma once

#include "heatcast/calendar.hpp"
#include "heatcast/series.hpp"
#include "heatcast/tensor3.hpp"
#include "heatcast/wavelet.hpp"

#include <filesystem>
#include <vector>

namespace heatcast {

/// Fixed channel layout of the network input.
enum Channel : Index {
    kPastConsumption = 0,
    kPastWeather = 1,
    kForecastWeather = 2,
    kTodayFlag = 3,
    kTomorrowFlag = 4,
    kChannelCount = 5,
};

struct InputTensor {
    Tensor3<double> channels;  // 5 x s x h
    Timestamp window_start{};  // first history hour
};

struct Example {
    InputTensor input;
    VectorXd target;  // scaled consumption over the horizon

    Timestamp forecast_start(Index h) const { return input.window_start + std::chrono::hours{h}; }
};

/// All-ones s x h matrix for a weekend or holiday, all-zeros otherwise.
MatrixXd encode_day_flags(const CalendarDay& day, Index s, Index h);

/// Stacks the three scalograms and the two day-flag planes. Inputs must already be scaled.
Example make_example(const VectorXd& past_consumption, const VectorXd& past_weather,
                     const VectorXd& forecast_weather, const CalendarDay& today,
                     const CalendarDay& tomorrow, const VectorXd& target, const CwtPlan<double>& plan,
                     Timestamp window_start = {});

/// Non-overlapping windows of stride h: example j takes hours [jh, (j+1)h) as history and the
/// following h hours as target and (recorded) forecast weather. Yields floor(N/h) - 1 examples.
std::vector<Example> build_dataset(const HourlySeries& consumption, const HourlySeries& weather,
                                   const Calendar& calendar, const CwtPlan<double>& plan, Index h);

/// Builds the input for the window whose history starts at `window_start` without needing a target.
InputTensor make_input(const HourlySeries& consumption, const HourlySeries& weather,
                       const Calendar& calendar, const CwtPlan<double>& plan, Index h,
                       Timestamp window_start);

/// Debug dump: one CSV per channel plus the target, per example.
void export_dataset(const std::filesystem::path& dir, const std::vector<Example>& examples);

}  // namespace heatcast
