#include "heatcast/evaluation.hpp"

#include "heatcast/io.hpp"
#include "heatcast/time.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

namespace heatcast {

std::string_view to_string(Season s) {
    switch (s) {
    case Season::DJF: return "DJF";
    case Season::MAM: return "MAM";
    case Season::JJA: return "JJA";
    case Season::SON: return "SON";
    }
    return "?";
}

Season season_of(Date d) {
    switch (month_of(d)) {
    case 12: case 1: case 2: return Season::DJF;
    case 3: case 4: case 5: return Season::MAM;
    case 6: case 7: case 8: return Season::JJA;
    default: return Season::SON;
    }
}

EvalReport evaluate(std::span<const ForecastWindow> windows, SeasonMapping season) {
    if (windows.empty()) throw DataError("evaluation needs at least one window");
    std::vector<const ForecastWindow*> sorted;
    for (const auto& w : windows) sorted.push_back(&w);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return std::tie(a->zone, a->window_start) < std::tie(b->zone, b->window_start);
    });

    EvalReport report;
    for (const auto* w : sorted)
        report.per_window.push_back(
            {w->window_start, w->zone, season(date_of(w->window_start)), mape(w->prediction, w->truth),
             rmse(w->prediction, w->truth)});

    double mape_sum = 0, rmse_sum = 0;
    for (const auto& m : report.per_window) {
        mape_sum += m.mape;
        rmse_sum += m.rmse;
        auto& g = report.breakdown[{m.zone, m.season}];
        ++g.windows;
        g.mean_mape += m.mape;
        g.mean_rmse += m.rmse;
    }
    const double n = double(report.per_window.size());
    report.mean_mape = mape_sum / n;
    report.mean_rmse = rmse_sum / n;
    for (auto& [key, g] : report.breakdown) {
        g.mean_mape /= double(g.windows);
        g.mean_rmse /= double(g.windows);
    }
    for (const auto& m : report.per_window) {
        auto& g = report.breakdown[{m.zone, m.season}];
        g.var_mape += (m.mape - g.mean_mape) * (m.mape - g.mean_mape);
    }
    for (auto& [key, g] : report.breakdown) g.var_mape /= double(g.windows);
    return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "window_start,zone,season,mape,rmse\n";
    for (const auto& m : report.per_window)
        out << format_timestamp(m.window_start) << ',' << m.zone << ',' << to_string(m.season) << ','
            << format_double(m.mape) << ',' << format_double(m.rmse) << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const std::pair<std::string, const EvalReport*>> reports) {
    out << "model,zone,season,windows,mean_mape,mean_rmse,var_mape\n";
    for (const auto& [label, report] : reports) {
        std::map<std::string, std::vector<const WindowMetrics*>> by_zone;
        for (const auto& m : report->per_window) by_zone[m.zone].push_back(&m);
        for (const auto& [key, g] : report->breakdown)
            out << label << ',' << key.first << ',' << to_string(key.second) << ',' << g.windows << ','
                << format_double(g.mean_mape) << ',' << format_double(g.mean_rmse) << ','
                << format_double(g.var_mape) << '\n';
        for (const auto& [zone, ms] : by_zone) {
            double sm = 0, sr = 0;
            for (const auto* m : ms) {
                sm += m->mape;
                sr += m->rmse;
            }
            const double mean_m = sm / double(ms.size());
            double var = 0;
            for (const auto* m : ms) var += (m->mape - mean_m) * (m->mape - mean_m);
            out << label << ',' << zone << ",ALL," << ms.size() << ',' << format_double(mean_m) << ','
                << format_double(sr / double(ms.size())) << ',' << format_double(var / double(ms.size())) << '\n';
        }
    }
}

void write_plot_csv(std::ostream& out, const ForecastWindow& w, const VectorXd* baseline) {
    if (w.prediction.size() != w.truth.size() || (baseline && baseline->size() != w.truth.size()))
        throw DataError("plot series lengths differ");
    out << "timestamp,truth,prediction" << (baseline ? ",baseline" : "") << '\n';
    for (Index i = 0; i < w.truth.size(); ++i) {
        out << format_timestamp(w.window_start + std::chrono::hours{i}) << ',' << format_double(w.truth[i]) << ','
            << format_double(w.prediction[i]);
        if (baseline) out << ',' << format_double((*baseline)[i]);
        out << '\n';
    }
}

void write_plot_svg(std::ostream& out, const ForecastWindow& w, const VectorXd* baseline) {
    if (w.prediction.size() != w.truth.size() || (baseline && baseline->size() != w.truth.size()))
        throw DataError("plot series lengths differ");
    constexpr double width = 640, height = 360, margin = 40;
    double lo = std::min(w.truth.minCoeff(), w.prediction.minCoeff());
    double hi = std::max(w.truth.maxCoeff(), w.prediction.maxCoeff());
    if (baseline) {
        lo = std::min(lo, baseline->minCoeff());
        hi = std::max(hi, baseline->maxCoeff());
    }
    if (hi <= lo) hi = lo + 1;
    const Index n = w.truth.size();
    auto px = [&](Index i) { return margin + (width - 2 * margin) * (n > 1 ? double(i) / double(n - 1) : 0.5); };
    auto py = [&](double v) { return height - margin - (height - 2 * margin) * (v - lo) / (hi - lo); };
    auto polyline = [&](const VectorXd& v, const char* colour) {
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        char buf[64];
        for (Index i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(i), py(v[i]));
            out << buf;
        }
        out << "\"/>\n";
    };
    char buf[128];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", margin,
                  height - margin, width - margin, height - margin);
    out << buf;
    std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", margin,
                  margin, margin, height - margin);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"12\">%.0f kW</text>\n", 2.0, margin - 8, hi);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"12\">%.0f kW</text>\n", 2.0,
                  height - margin + 16, lo);
    out << buf;
    out << "<text x=\"" << margin << "\" y=\"" << height - 8 << "\" font-size=\"12\">"
        << format_timestamp(w.window_start) << " (+" << n << " h)</text>\n";
    polyline(w.truth, "black");
    polyline(w.prediction, "crimson");
    if (baseline) polyline(*baseline, "steelblue");
    out << "</svg>\n";
}

}  // namespace heatcast
