#pragma once

#include "heatcast/calendar.hpp"
#include "heatcast/evaluation.hpp"
#include "heatcast/nn/model.hpp"
#include "heatcast/series.hpp"
#include "heatcast/tensor_assembly.hpp"
#include "heatcast/wavelet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace heatcast {

/// Windowing and encoding settings shared by training and serving.
struct PipelineConfig {
    Index history = 24;  // h
    Index horizon = 24;  // n
    Index scales = 24;   // s
    SplitSpec split;
    Boundary boundary = Boundary::ZeroPad;
    double support_radius_factor = 4.0;

    WaveletConfig<double> wavelet() const;
    void validate() const;
};

/// Aligned raw series, fitted scalers and the three example sets.
struct PreparedData {
    HourlySeries consumption;  // Rate, kW, whole days
    HourlySeries weather;      // deg C, same range
    Calendar calendar;
    Scaler<double> consumption_scaler;
    Scaler<double> weather_scaler;
    SplitSegments raw;  // [0] consumption, [1] weather per segment
    std::vector<Example> train;
    std::vector<Example> val;
    std::vector<Example> test;
};

/// Rate consumption (differenced when accumulated) and weather over their common whole days.
std::pair<HourlySeries, HourlySeries> align_inputs(const HourlySeries& consumption, const HourlySeries& weather);

/// Differencing (for accumulated input), alignment, whole-day trimming, chronological split,
/// scaling and tensor assembly. Scalers are fitted on the training segment unless supplied.
PreparedData prepare_data(const HourlySeries& consumption, const HourlySeries& weather, const Calendar& calendar,
                          const PipelineConfig& cfg, const std::optional<Scaler<double>>& consumption_scaler = {},
                          const std::optional<Scaler<double>>& weather_scaler = {});

/// Forecast windows for a segment's examples, with ground truth in kW.
std::vector<ForecastWindow> model_forecasts(const nn::Model<double>& model, std::span<const Example> examples,
                                            const HourlySeries& raw_consumption, const std::string& zone);
std::vector<ForecastWindow> naive_forecasts(std::span<const Example> examples, const HourlySeries& raw_consumption,
                                            const std::string& zone);

}  // namespace heatcast
