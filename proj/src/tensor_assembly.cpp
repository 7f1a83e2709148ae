#include "heatcast/tensor_assembly.hpp"

#include "heatcast/io.hpp"
#include "heatcast/time.hpp"

#include <sstream>
#include <string>

namespace heatcast {
namespace {

void check_alignment(const HourlySeries& consumption, const HourlySeries& weather) {
    if (consumption.start() != weather.start() || consumption.size() != weather.size())
        throw DataError("consumption and weather series are not aligned");
}

InputTensor assemble(const VectorXd& past_consumption, const VectorXd& past_weather,
                     const VectorXd& forecast_weather, const CalendarDay& today,
                     const CalendarDay& tomorrow, const CwtPlan<double>& plan, Timestamp window_start) {
    const Index h = past_consumption.size();
    const Index s = plan.config().scales();
    if (past_weather.size() != h || forecast_weather.size() != h)
        throw DataError("history and horizon lengths differ: h=" + std::to_string(h) +
                        ", past weather " + std::to_string(past_weather.size()) + ", forecast weather " +
                        std::to_string(forecast_weather.size()));
    InputTensor input{Tensor3<double>(kChannelCount, s, h), window_start};
    Matrix<double> coeffs;
    plan.apply(past_consumption, coeffs);
    input.channels.channel(kPastConsumption) = coeffs;
    plan.apply(past_weather, coeffs);
    input.channels.channel(kPastWeather) = coeffs;
    plan.apply(forecast_weather, coeffs);
    input.channels.channel(kForecastWeather) = coeffs;
    input.channels.channel(kTodayFlag) = encode_day_flags(today, s, h);
    input.channels.channel(kTomorrowFlag) = encode_day_flags(tomorrow, s, h);
    return input;
}

}  // namespace

MatrixXd encode_day_flags(const CalendarDay& day, Index s, Index h) {
    return MatrixXd::Constant(s, h, day.is_off_day() ? 1.0 : 0.0);
}

Example make_example(const VectorXd& past_consumption, const VectorXd& past_weather,
                     const VectorXd& forecast_weather, const CalendarDay& today,
                     const CalendarDay& tomorrow, const VectorXd& target, const CwtPlan<double>& plan,
                     Timestamp window_start) {
    if (target.size() != past_consumption.size())
        throw DataError("horizon n=" + std::to_string(target.size()) + " must equal history h=" +
                        std::to_string(past_consumption.size()));
    return Example{assemble(past_consumption, past_weather, forecast_weather, today, tomorrow, plan,
                            window_start),
                   target};
}

InputTensor make_input(const HourlySeries& consumption, const HourlySeries& weather,
                       const Calendar& calendar, const CwtPlan<double>& plan, Index h,
                       Timestamp window_start) {
    check_alignment(consumption, weather);
    const Index offset = (window_start - consumption.start()).count();
    if (offset < 0 || offset + 2 * h > consumption.size())
        throw DataError("window " + format_timestamp(window_start) + " needs " + std::to_string(2 * h) +
                        " hours inside the series");
    const auto today = calendar.day(date_of(window_start + std::chrono::hours{h - 1}));
    const auto tomorrow = calendar.day(date_of(window_start + std::chrono::hours{h}));
    return assemble(consumption.values().segment(offset, h), weather.values().segment(offset, h),
                    weather.values().segment(offset + h, h), today, tomorrow, plan, window_start);
}

std::vector<Example> build_dataset(const HourlySeries& consumption, const HourlySeries& weather,
                                   const Calendar& calendar, const CwtPlan<double>& plan, Index h) {
    check_alignment(consumption, weather);
    if (h < 1) throw DataError("history length must be positive");
    const Index n_hours = consumption.size();
    if (n_hours < 2 * h)
        throw DataError("dataset needs at least " + std::to_string(2 * h) + " hours, got " +
                        std::to_string(n_hours));
    const Index count = n_hours / h - 1;
    std::vector<Example> out;
    out.reserve(std::size_t(count));
    for (Index j = 0; j < count; ++j) {
        const Timestamp start = consumption.time_at(j * h);
        Example ex;
        ex.input = make_input(consumption, weather, calendar, plan, h, start);
        ex.target = consumption.values().segment((j + 1) * h, h);
        out.push_back(std::move(ex));
    }
    return out;
}

void export_dataset(const std::filesystem::path& dir, const std::vector<Example>& examples) {
    for (std::size_t j = 0; j < examples.size(); ++j) {
        const auto& ex = examples[j];
        const auto stem = "example_" + std::to_string(j);
        for (Index c = 0; c < ex.input.channels.channels; ++c) {
            std::ostringstream os;
            const auto plane = ex.input.channels.channel(c);
            for (Index r = 0; r < plane.rows(); ++r) {
                for (Index k = 0; k < plane.cols(); ++k) os << (k ? "," : "") << format_double(plane(r, k));
                os << '\n';
            }
            write_file_atomic(dir / (stem + "_ch" + std::to_string(c) + ".csv"), os.str());
        }
        std::ostringstream os;
        os << "window_start,hour,target\n";
        for (Index i = 0; i < ex.target.size(); ++i)
            os << format_timestamp(ex.input.window_start) << ',' << i << ',' << format_double(ex.target[i]) << '\n';
        write_file_atomic(dir / (stem + "_target.csv"), os.str());
    }
}

}  // namespace heatcast
