#pragma once

#include "heatcast/core.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace heatcast {

/// Mean absolute percentage error in percent. Hours with zero truth are left out of the mean.
template <typename A, typename B>
double mape(const Eigen::MatrixBase<A>& pred, const Eigen::MatrixBase<B>& truth) {
    if (pred.size() != truth.size()) throw DataError("mape: prediction and truth lengths differ");
    double sum = 0;
    Index used = 0;
    for (Index i = 0; i < truth.size(); ++i) {
        const double t = double(truth(i));
        if (t == 0.0) continue;
        sum += std::abs(double(pred(i)) - t) / std::abs(t);
        ++used;
    }
    if (used == 0) throw DataError("mape undefined: every truth value is zero");
    return 100.0 * sum / double(used);
}

/// Root mean squared error, in the units of the inputs.
template <typename A, typename B>
double rmse(const Eigen::MatrixBase<A>& pred, const Eigen::MatrixBase<B>& truth) {
    if (pred.size() != truth.size()) throw DataError("rmse: prediction and truth lengths differ");
    if (pred.size() == 0) throw DataError("rmse of empty vectors");
    return std::sqrt((pred.template cast<double>() - truth.template cast<double>()).squaredNorm() /
                     double(pred.size()));
}

/// Repeats the most recent 24 hours.
template <typename Derived>
VectorXd seasonal_naive(const Eigen::MatrixBase<Derived>& history, Index period = 24) {
    if (history.size() < period)
        throw DataError("seasonal naive needs " + std::to_string(period) + " history values, got " +
                        std::to_string(history.size()));
    return history.tail(period).template cast<double>();
}

enum class Season { DJF, MAM, JJA, SON };

std::string_view to_string(Season s);

/// Meteorological season of a date.
Season season_of(Date d);

/// One forecast next to its ground truth, both in original units.
struct ForecastWindow {
    Timestamp window_start{};  // first forecast hour
    std::string zone;
    VectorXd prediction;
    VectorXd truth;
};

struct WindowMetrics {
    Timestamp window_start{};
    std::string zone;
    Season season = Season::DJF;
    double mape = 0;
    double rmse = 0;
};

struct GroupStats {
    Index windows = 0;
    double mean_mape = 0;
    double mean_rmse = 0;
    double var_mape = 0;  // population variance over windows
};

struct EvalReport {
    std::vector<WindowMetrics> per_window;  // sorted by (zone, window_start)
    double mean_mape = 0;
    double mean_rmse = 0;
    std::map<std::pair<std::string, Season>, GroupStats> breakdown;
};

using SeasonMapping = Season (*)(Date);

/// Per-window metrics, overall means and (zone, season) groups. Windows are sorted first so the
/// result does not depend on input order.
EvalReport evaluate(std::span<const ForecastWindow> windows, SeasonMapping season = &season_of);

/// `window_start,zone,season,mape,rmse`
void write_report_csv(std::ostream& out, const EvalReport& report);

/// `model,zone,season,windows,mean_mape,mean_rmse,var_mape`, one row per group plus one
/// `ALL` row per zone, for each labelled report.
void write_summary_csv(std::ostream& out, std::span<const std::pair<std::string, const EvalReport*>> reports);

/// `timestamp,truth,prediction[,baseline]`
void write_plot_csv(std::ostream& out, const ForecastWindow& window, const VectorXd* baseline = nullptr);

/// Minimal line plot: axes plus truth and prediction polylines (and the baseline when given).
void write_plot_svg(std::ostream& out, const ForecastWindow& window, const VectorXd* baseline = nullptr);

}  // namespace heatcast
