#include "heatcast/evaluation.hpp"
#include "heatcast/time.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace heatcast;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(Index(v.size()));
    Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

Timestamp at(const char* text) { return *parse_timestamp(text); }

std::vector<ForecastWindow> sample_windows() {
    std::mt19937_64 rng(11);
    std::vector<ForecastWindow> ws;
    const char* starts[] = {"2017-01-10T00:00:00Z", "2017-04-02T00:00:00Z", "2017-07-20T00:00:00Z",
                            "2017-10-05T00:00:00Z", "2017-12-24T00:00:00Z", "2017-02-01T00:00:00Z"};
    for (const char* s : starts) {
        VectorXd truth = test::random_vector(rng, 24, 500, 1500);
        VectorXd pred = truth + test::random_vector(rng, 24, -50, 50);
        ws.push_back({at(s), "zone1", pred, truth});
    }
    return ws;
}

}  // namespace

TEST(Metrics, MapeExample) {
    EXPECT_EQ(mape(vec({110}), vec({100})), 10.0);
    EXPECT_EQ(mape(vec({90, 110}), vec({100, 100})), 10.0);
    EXPECT_DOUBLE_EQ(mape(vec({0, 5}), vec({1, 10})), 75.0);
}

TEST(Metrics, MapeSkipsZeroTruth) {
    EXPECT_EQ(mape(vec({110, 7}), vec({100, 0})), 10.0);
    EXPECT_THROW(mape(vec({1, 2}), vec({0, 0})), DataError);
    EXPECT_THROW(mape(vec({1}), vec({1, 2})), DataError);
}

TEST(Metrics, RmseExample) {
    EXPECT_NEAR(rmse(vec({3, 4}), vec({0, 0})), 3.5355339, 1e-6);
    EXPECT_EQ(rmse(vec({1, 2, 3}), vec({1, 2, 3})), 0.0);
    EXPECT_THROW(rmse(VectorXd(0), VectorXd(0)), DataError);
}

TEST(Metrics, MapeIsScaleInvariant) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const VectorXd t = test::random_vector(rng, 24, 1, 100), p = test::random_vector(rng, 24, 1, 100);
        const double k = std::uniform_real_distribution<double>(0.01, 100)(rng);
        EXPECT_NEAR(mape(VectorXd(k * p), VectorXd(k * t)), mape(p, t), 1e-9);
        EXPECT_NEAR(rmse(VectorXd(k * p), VectorXd(k * t)), k * rmse(p, t), 1e-9 * k * 100);
        EXPECT_GE(mape(p, t), 0.0);
    }
}

TEST(SeasonalNaive, RepeatsLastDay) {
    VectorXd hist(48);
    for (Index i = 0; i < 48; ++i) hist[i] = double(i);
    const VectorXd f = seasonal_naive(hist);
    ASSERT_EQ(f.size(), 24);
    for (Index i = 0; i < 24; ++i) EXPECT_EQ(f[i], double(24 + i));
    EXPECT_THROW(seasonal_naive(VectorXd::Zero(23)), DataError);
}

TEST(Season, MeteorologicalMonths) {
    const Season expected[] = {Season::DJF, Season::DJF, Season::MAM, Season::MAM, Season::MAM, Season::JJA,
                               Season::JJA, Season::JJA, Season::SON, Season::SON, Season::SON, Season::DJF};
    for (unsigned m = 1; m <= 12; ++m)
        EXPECT_EQ(season_of(Date{std::chrono::year{2017} / m / 15}), expected[m - 1]) << m;
    EXPECT_EQ(to_string(Season::SON), "SON");
}

TEST(Evaluate, AggregatesAreMeansOfWindows) {
    const auto ws = sample_windows();
    const auto r = evaluate(ws);
    ASSERT_EQ(r.per_window.size(), ws.size());
    double sm = 0, sr = 0;
    for (const auto& m : r.per_window) {
        sm += m.mape;
        sr += m.rmse;
    }
    EXPECT_EQ(r.mean_mape, sm / double(ws.size()));
    EXPECT_EQ(r.mean_rmse, sr / double(ws.size()));
    for (const auto& w : ws) {
        const auto it = std::find_if(r.per_window.begin(), r.per_window.end(),
                                     [&](const WindowMetrics& m) { return m.window_start == w.window_start; });
        ASSERT_NE(it, r.per_window.end());
        EXPECT_EQ(it->mape, mape(w.prediction, w.truth));
        EXPECT_EQ(it->rmse, rmse(w.prediction, w.truth));
    }
}

TEST(Evaluate, SeasonGroups) {
    const auto r = evaluate(sample_windows());
    ASSERT_EQ(r.breakdown.size(), 4u);
    const auto& djf = r.breakdown.at({"zone1", Season::DJF});
    EXPECT_EQ(djf.windows, 3);
    std::vector<double> m;
    for (const auto& w : r.per_window)
        if (w.season == Season::DJF) m.push_back(w.mape);
    const double mean = (m[0] + m[1] + m[2]) / 3.0;
    double var = 0;
    for (double x : m) var += (x - mean) * (x - mean);
    EXPECT_NEAR(djf.mean_mape, mean, 1e-12);
    EXPECT_NEAR(djf.var_mape, var / 3.0, 1e-12);
    EXPECT_EQ(r.breakdown.at({"zone1", Season::JJA}).var_mape, 0.0);
}

TEST(Evaluate, IndependentOfInputOrder) {
    auto ws = sample_windows();
    const auto a = evaluate(ws);
    std::reverse(ws.begin(), ws.end());
    const auto b = evaluate(ws);
    EXPECT_EQ(a.mean_mape, b.mean_mape);
    EXPECT_EQ(a.mean_rmse, b.mean_rmse);
    for (std::size_t i = 0; i < a.per_window.size(); ++i)
        EXPECT_EQ(a.per_window[i].window_start, b.per_window[i].window_start);
    EXPECT_TRUE(std::is_sorted(a.per_window.begin(), a.per_window.end(),
                               [](const auto& x, const auto& y) { return x.window_start < y.window_start; }));
}

TEST(Evaluate, RejectsEmptyInput) { EXPECT_THROW(evaluate({}), DataError); }

TEST(Reports, CsvLayout) {
    const auto r = evaluate(sample_windows());
    std::ostringstream report, summary;
    write_report_csv(report, r);
    const std::string text = report.str();
    EXPECT_EQ(text.rfind("window_start,zone,season,mape,rmse\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);

    const std::pair<std::string, const EvalReport*> reports[] = {{"cnn", &r}, {"naive", &r}};
    write_summary_csv(summary, reports);
    const std::string s = summary.str();
    EXPECT_EQ(s.rfind("model,zone,season,windows,mean_mape,mean_rmse,var_mape\n", 0), 0u);
    // Four seasons plus ALL, for each of two models.
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 11);
    EXPECT_NE(s.find("cnn,zone1,ALL,6,"), std::string::npos);
    EXPECT_NE(s.find("naive,zone1,DJF,3,"), std::string::npos);
}

TEST(Reports, PlotFiles) {
    const auto ws = sample_windows();
    const VectorXd base = ws[0].truth;
    std::ostringstream csv, svg;
    write_plot_csv(csv, ws[0], &base);
    write_plot_svg(svg, ws[0], &base);
    const std::string c = csv.str();
    EXPECT_EQ(c.rfind("timestamp,truth,prediction,baseline\n", 0), 0u);
    EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 25);
    const std::string g = svg.str();
    EXPECT_NE(g.find("<svg"), std::string::npos);
    EXPECT_EQ(std::count(g.begin(), g.end(), '<'), std::count(g.begin(), g.end(), '>'));
}
