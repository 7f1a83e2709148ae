#include "heatcast/pipeline.hpp"

#include "heatcast/time.hpp"

namespace heatcast {

WaveletConfig<double> PipelineConfig::wavelet() const {
    auto cfg = WaveletConfig<double>::with_scales(int(scales), boundary);
    cfg.support_radius_factor = support_radius_factor;
    return cfg;
}

void PipelineConfig::validate() const {
    if (history != horizon)
        throw ConfigError("history h=" + std::to_string(history) + " must equal horizon n=" + std::to_string(horizon));
    if (history < 1 || scales < 1) throw ConfigError("h and s must be positive");
    if (split.train_days < 1 || split.val_days < 1 || split.test_days < 1)
        throw ConfigError("split days must all be positive");
    wavelet().validate();
}

std::pair<HourlySeries, HourlySeries> align_inputs(const HourlySeries& consumption, const HourlySeries& weather) {
    const HourlySeries rate =
        consumption.kind() == SeriesKind::Accumulated ? clean_and_differentiate(consumption) : consumption;
    const HourlySeries both[] = {rate, weather};
    auto aligned = align_series(both);
    HourlySeries cons = trim_to_whole_days(aligned[0]);
    HourlySeries wx = aligned[1].slice((cons.start() - aligned[1].start()).count(), cons.size());
    return {std::move(cons), std::move(wx)};
}

PreparedData prepare_data(const HourlySeries& consumption, const HourlySeries& weather, const Calendar& calendar,
                          const PipelineConfig& cfg, const std::optional<Scaler<double>>& consumption_scaler,
                          const std::optional<Scaler<double>>& weather_scaler) {
    cfg.validate();
    const auto [cons, wx] = align_inputs(consumption, weather);

    const HourlySeries pair[] = {cons, wx};
    PreparedData out{cons, wx, calendar, {}, {}, split_dataset(pair, cfg.split), {}, {}, {}};
    out.consumption_scaler = consumption_scaler ? *consumption_scaler : scaler_fit(out.raw.train[0]);
    out.weather_scaler = weather_scaler ? *weather_scaler : scaler_fit(out.raw.train[1]);

    const CwtPlan<double> plan(cfg.wavelet());
    auto build = [&](const std::vector<HourlySeries>& seg) {
        return build_dataset(scale_series(seg[0], out.consumption_scaler), scale_series(seg[1], out.weather_scaler),
                             calendar, plan, cfg.history);
    };
    out.train = build(out.raw.train);
    out.val = build(out.raw.val);
    out.test = build(out.raw.test);
    return out;
}

namespace {

VectorXd truth_for(const Example& ex, const HourlySeries& raw, Index h) {
    const Index offset = (ex.forecast_start(h) - raw.start()).count();
    if (offset < 0 || offset + h > raw.size()) throw DataError("example lies outside the raw segment");
    return raw.values().segment(offset, h);
}

}  // namespace

std::vector<ForecastWindow> model_forecasts(const nn::Model<double>& model, std::span<const Example> examples,
                                            const HourlySeries& raw_consumption, const std::string& zone) {
    std::vector<ForecastWindow> out;
    const Index h = model.config.cols;
    for (const auto& ex : examples)
        out.push_back({ex.forecast_start(h), zone, nn::predict_window(model, ex.input.channels),
                       truth_for(ex, raw_consumption, h)});
    return out;
}

std::vector<ForecastWindow> naive_forecasts(std::span<const Example> examples, const HourlySeries& raw_consumption,
                                            const std::string& zone) {
    std::vector<ForecastWindow> out;
    for (const auto& ex : examples) {
        const Index h = ex.target.size();
        const Index offset = (ex.input.window_start - raw_consumption.start()).count();
        if (offset < 0 || offset + h > raw_consumption.size()) throw DataError("example lies outside the raw segment");
        out.push_back({ex.forecast_start(h), zone, seasonal_naive(raw_consumption.values().segment(offset, h), h),
                       truth_for(ex, raw_consumption, h)});
    }
    return out;
}

}  // namespace heatcast
