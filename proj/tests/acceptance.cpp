// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Tolerances and budgets are pinned below.

#include "heatcast/cli.hpp"
#include "heatcast/evaluation.hpp"
#include "heatcast/io.hpp"
#include "heatcast/nn/checkpoint.hpp"
#include "heatcast/nn/train.hpp"
#include "heatcast/pipeline.hpp"
#include "heatcast/synthgen.hpp"
#include "heatcast/time.hpp"

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <sstream>

using namespace heatcast;
namespace fs = std::filesystem;

namespace {

constexpr double kGradTol = 1e-4;
constexpr double kGradStep = 1e-4;
constexpr double kGradBudgetS = 60;
constexpr double kCwtTol = 1e-10;
constexpr double kCwtBudgetS = 10;
constexpr double kConstantTol = 1e-9;  // times |c|
constexpr double kLinearTol = 1e-10;
constexpr double kKernelSumTol = 1e-12;
constexpr double kOverfitMse = 1e-3;
constexpr int kOverfitEpochs = 2000;
constexpr double kOverfitBudgetS = 300;
constexpr double kEndToEndBudgetS = 1800;
constexpr double kScalerTol = 1e-9;
constexpr double kRmseTol = 1e-6;
constexpr double kCorrelationBound = -0.5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Verdict {
    bool ok = true;
    std::string detail;

    void check(bool cond, const std::string& what) {
        ok = ok && cond;
        if (!detail.empty()) detail += "; ";
        detail += what + (cond ? "" : " [fail]");
    }
};

int failures = 0;

void report(int id, const char* name, const Verdict& v) {
    std::cout << (v.ok ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << v.detail << std::endl;
    if (!v.ok) ++failures;
}

template <typename F>
void guarded(int id, const char* name, F&& body) {
    Verdict v;
    try {
        body(v);
    } catch (const std::exception& e) {
        v.check(false, std::string("exception: ") + e.what());
    }
    report(id, name, v);
}

// 1 -------------------------------------------------------------------------
void gradient_oracle(Verdict& v) {
    const auto t0 = Clock::now();
    auto cfg = test::tiny_config();  // s = h = 4, conv [2,3,4], dense [8,4], n = 4
    double worst = 0;
    Index params = 0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto r = test::check_gradients(cfg, seed, 3, kGradStep);
        worst = std::max(worst, r.max_relative_error);
        params = r.parameters;
    }
    const double secs = seconds_since(t0);
    v.check(worst < kGradTol, "max relative error " + fmt(worst) + " over " + std::to_string(params) +
                                  " parameters x 3 seeds < " + fmt(kGradTol));
    v.check(secs < kGradBudgetS, "runtime " + fmt(secs) + " s < " + fmt(kGradBudgetS) + " s");
}

// 2 -------------------------------------------------------------------------
void cwt_oracle(Verdict& v) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    double worst = 0;
    for (auto mode : {Boundary::Reflect, Boundary::ZeroPad}) {
        const auto cfg = WaveletConfig<double>::with_scales(24, mode);
        const CwtPlan<double> plan(cfg);
        for (int trial = 0; trial < 100; ++trial) {
            const VectorXd x = test::random_vector(rng, 24, -5, 5);
            const MatrixXd slow = test::reference_cwt(x, cfg.scale_grid, mode);
            worst = std::max(worst, (plan(x).coefficients - slow).cwiseAbs().maxCoeff());
        }
    }
    const double secs = seconds_since(t0);
    v.check(worst <= kCwtTol, "max |fast - direct| " + fmt(worst) + " over 2 x 100 windows <= " + fmt(kCwtTol));
    v.check(secs < kCwtBudgetS, "runtime " + fmt(secs) + " s < " + fmt(kCwtBudgetS) + " s");
}

// 3 -------------------------------------------------------------------------
void cwt_properties(Verdict& v) {
    const auto reflect = WaveletConfig<double>::with_scales(24, Boundary::Reflect);
    double worst_const = 0;
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const double c = std::uniform_real_distribution<double>(-1e3, 1e3)(rng);
        const auto s = cwt(VectorXd::Constant(24, c), reflect);
        worst_const = std::max(worst_const, s.coefficients.cwiseAbs().maxCoeff() / std::abs(c));
    }
    v.check(worst_const <= kConstantTol, "constant windows (reflect): max |W| / |c| = " + fmt(worst_const));

    double worst_lin = 0;
    for (auto mode : {Boundary::Reflect, Boundary::ZeroPad}) {
        const CwtPlan<double> plan(WaveletConfig<double>::with_scales(24, mode));
        for (int trial = 0; trial < 50; ++trial) {
            const VectorXd x = test::random_vector(rng, 24), y = test::random_vector(rng, 24);
            const double a = std::uniform_real_distribution<double>(-3, 3)(rng);
            const double b = std::uniform_real_distribution<double>(-3, 3)(rng);
            const MatrixXd d = plan(a * x + b * y).coefficients - (a * plan(x).coefficients + b * plan(y).coefficients);
            worst_lin = std::max(worst_lin, d.cwiseAbs().maxCoeff());
        }
    }
    v.check(worst_lin <= kLinearTol, "linearity residual " + fmt(worst_lin));

    double worst_sum = 0;
    for (Index a = 1; a <= 24; ++a)
        worst_sum = std::max(worst_sum, std::abs(discretize_wavelet(double(a), reflect).sum()));
    v.check(worst_sum <= kKernelSumTol, "max |kernel sum| over scales 1..24 = " + fmt(worst_sum));
}

// 4 -------------------------------------------------------------------------
void overfit(Verdict& v) {
    const auto t0 = Clock::now();
    // Eight 4-hour windows of synthetic load, encoded with 4 scales.
    SynthConfig sc;
    sc.days = 2;
    const auto synth = generate(sc);
    const auto cons = scale_series(synth.consumption, scaler_fit(synth.consumption));
    const auto wx = scale_series(synth.temperature, scaler_fit(synth.temperature));
    const CwtPlan<double> plan(WaveletConfig<double>::with_scales(4, Boundary::ZeroPad));
    auto examples = build_dataset(cons, wx, synth.calendar, plan, 4);
    examples.resize(8);

    auto cfg = test::tiny_config();
    cfg.dropout_rate = 0.0;
    cfg.max_epochs = kOverfitEpochs;
    cfg.patience = kOverfitEpochs;
    const auto result = nn::train<double>(cfg, examples, examples, 42);
    const auto& log = result.log.epochs;
    double best = log.front().train_mse;
    int reached = 0;
    for (const auto& e : log) {
        best = std::min(best, e.train_mse);
        if (!reached && e.train_mse < kOverfitMse) reached = e.epoch;
    }
    const double secs = seconds_since(t0);
    v.check(reached > 0, "train MSE < " + fmt(kOverfitMse) + " first at epoch " + std::to_string(reached) +
                             " (best " + fmt(best) + ")");
    v.check(log.size() >= 100 && log[99].train_mse < log[0].train_mse,
            "epoch 100 loss " + fmt(log.size() >= 100 ? log[99].train_mse : NAN) + " < epoch 1 loss " +
                fmt(log[0].train_mse));
    v.check(secs < kOverfitBudgetS, "runtime " + fmt(secs) + " s < " + fmt(kOverfitBudgetS) + " s");
}

// 5 -------------------------------------------------------------------------
void end_to_end(Verdict& v) {
    const auto t0 = Clock::now();
    SynthConfig sc;
    sc.days = 1090;
    sc.seed = 7;
    const auto synth = generate(sc);

    PipelineConfig pc;  // h = n = s = 24, split 730/180/180
    const auto data = prepare_data(synth.consumption, synth.temperature, synth.calendar, pc);

    nn::ModelConfig mc;
    mc.dense_widths = {64, 32};
    auto single = nn::train<float>(mc, data.train, data.val, 7, [](const nn::EpochRecord& e) {
        std::cerr << "  epoch " << e.epoch << " train " << fmt(e.train_mse) << " val " << fmt(e.val_mse) << '\n';
    });
    nn::Model<double> model;
    model.config = mc;
    model.params = single.params.cast<double>();
    model.consumption_scaler = data.consumption_scaler;
    model.weather_scaler = data.weather_scaler;
    model.wavelet = pc.wavelet();

    const auto cnn = evaluate(model_forecasts(model, data.test, data.raw.test[0], "zone1"));
    const auto naive = evaluate(naive_forecasts(data.test, data.raw.test[0], "zone1"));
    const double secs = seconds_since(t0);

    std::cout << "  config: synth days 1090 seed 7, split 730/180/180, boundary " << to_string(pc.boundary)
              << ", conv 32,64,128, dense 64,32, dropout " << mc.dropout_rate << ", lr " << mc.learning_rate
              << ", batch " << mc.batch_size << ", max_epochs " << mc.max_epochs << ", patience " << mc.patience
              << ", float arithmetic, seed 7; best epoch " << single.log.best_epoch << " of "
              << single.log.epochs.size() << '\n';
    bool finite = true;
    for (const auto& [label, r] : {std::pair{"cnn", &cnn}, std::pair{"naive", &naive}})
        for (const auto& [key, g] : r->breakdown) {
            finite = finite && std::isfinite(g.var_mape);
            std::cout << "  " << label << ' ' << to_string(key.second) << ": windows " << g.windows << ", mean MAPE "
                      << fmt(g.mean_mape) << "%, MAPE variance " << fmt(g.var_mape) << '\n';
        }
    v.check(data.test.size() == 179, "test windows " + std::to_string(data.test.size()));
    v.check(cnn.mean_mape < naive.mean_mape,
            "CNN test MAPE " + fmt(cnn.mean_mape) + "% < seasonal-naive " + fmt(naive.mean_mape) + "%");
    v.check(finite, "per-season MAPE variance finite");
    v.check(secs < kEndToEndBudgetS, "runtime " + fmt(secs) + " s < " + fmt(kEndToEndBudgetS) + " s");
}

// 6 -------------------------------------------------------------------------
void pipeline_exactness(Verdict& v) {
    const Timestamp t0 = *parse_timestamp("2017-01-01T00:00:00Z");
    const auto cleaned = clean_and_differentiate(HourlySeries(t0, SeriesKind::Accumulated, Eigen::Vector3d(10, 8, 15)));
    v.check(cleaned.values() == Eigen::Vector2d(0, 7), "clean [10,8,15] -> [" + fmt(cleaned.values()[0]) + "," +
                                                          fmt(cleaned.values()[1]) + "]");

    std::mt19937_64 rng(6);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const VectorXd x = test::random_vector(rng, 500, -1e4, 1e4);
        const auto s = Scaler<double>::fit(x);
        worst = std::max(worst, (s.inverse(s.transform(x)) - x).cwiseAbs().maxCoeff());
    }
    v.check(worst <= kScalerTol, "scaler round trip max error " + fmt(worst));

    SynthConfig sc;
    const auto synth = generate(sc);
    const HourlySeries both[] = {synth.consumption, synth.temperature};
    const auto split = split_dataset(both, SplitSpec{});
    const Index a = split.train[0].size(), b = split.val[0].size(), c = split.test[0].size();
    v.check(a == 17520 && b == 4320 && c == 4320,
            "split hours " + std::to_string(a) + "/" + std::to_string(b) + "/" + std::to_string(c));

    const CwtPlan<double> plan(WaveletConfig<double>::with_scales(24));
    const auto examples = build_dataset(split.train[0].slice(0, 72), split.train[1].slice(0, 72), synth.calendar,
                                        plan, 24);
    const auto& t = examples.front().input.channels;
    v.check(t.channels == 5 && t.rows == 24 && t.cols == 24,
            "tensor " + std::to_string(t.channels) + "x" + std::to_string(t.rows) + "x" + std::to_string(t.cols));

    nn::ModelConfig mc;
    const Index flat = nn::shape_chain(mc).flatten;
    v.check(flat == 73728, "flatten " + std::to_string(flat));
    mc.dense_widths = {16, 8};
    nn::Model<double> model;
    model.config = mc;
    model.params = nn::Parameters<double>::glorot(mc, rng);
    const auto y = nn::predict_window(model, t);
    v.check(y.size() == 24, "output " + std::to_string(y.size()));
}

// 7 -------------------------------------------------------------------------
void metrics(Verdict& v) {
    const double m = mape(Eigen::Matrix<double, 1, 1>(110), Eigen::Matrix<double, 1, 1>(100));
    v.check(m == 10.0, "MAPE([110],[100]) = " + fmt(m) + "%");
    const double r = rmse(Eigen::Vector2d(3, 4), Eigen::Vector2d(0, 0));
    v.check(std::abs(r - 3.5355339) <= kRmseTol, "RMSE([3,4],[0,0]) = " + format_double(r));

    std::mt19937_64 rng(7);
    std::vector<ForecastWindow> windows;
    for (int d = 0; d < 40; ++d) {
        const VectorXd truth = test::random_vector(rng, 24, 100, 900);
        windows.push_back({*parse_timestamp("2017-01-01T00:00:00Z") + std::chrono::hours{24 * (d * 9)}, "zone1",
                           truth + test::random_vector(rng, 24, -40, 40), truth});
    }
    const auto rep = evaluate(windows);
    double sm = 0, sr = 0;
    for (const auto& w : rep.per_window) {
        sm += w.mape;
        sr += w.rmse;
    }
    const double n = double(rep.per_window.size());
    v.check(rep.mean_mape == sm / n && rep.mean_rmse == sr / n, "aggregate equals mean of 40 per-window values");
}

// 8 -------------------------------------------------------------------------
void determinism(Verdict& v) {
    test::TempDir dir("acceptance_det");
    std::ostringstream out, err;
    const auto path = dir.path().string();
    if (cli::run({"heatcast", "synth", "--days", "60", "--seed", "11", "--out", path}, out, err) != 0)
        throw std::runtime_error("synth failed: " + err.str());
    auto train = [&](const std::string& sub) {
        const std::vector<std::string> args = {"heatcast", "train", "-q", "-c", path + "/run.cfg", "--out",
                                               path + "/" + sub, "--set", "train_days=40", "--set", "val_days=10",
                                               "--set", "test_days=10", "--set", "dense_widths=32,16", "--set",
                                               "max_epochs=4", "--seed", "3"};
        if (cli::run(args, out, err) != 0) throw std::runtime_error("train failed: " + err.str());
    };
    train("a");
    train("b");
    const bool same_log = read_file(dir.path() / "a/training_log.csv") == read_file(dir.path() / "b/training_log.csv");
    const bool same_ckpt = read_file(dir.path() / "a/model.ckpt") == read_file(dir.path() / "b/model.ckpt");
    v.check(same_log, "two train runs: training logs byte-identical");
    v.check(same_ckpt, "checkpoints byte-identical");

    // Round trip an in-memory model through disk and compare every prediction bit for bit.
    const auto first = nn::load_checkpoint(dir.path() / "a/model.ckpt");
    nn::save_checkpoint(dir.path() / "copy.ckpt", first);
    const auto second = nn::load_checkpoint(dir.path() / "copy.ckpt");
    const auto synth = generate([] {
        SynthConfig sc;
        sc.days = 60;
        sc.seed = 11;
        return sc;
    }());
    PipelineConfig pc;
    pc.split = {40, 10, 10};
    const auto data = prepare_data(synth.consumption, synth.temperature, synth.calendar, pc,
                                   first.model.consumption_scaler, first.model.weather_scaler);
    std::size_t identical = 0, total = 0;
    for (const auto* set : {&data.train, &data.val, &data.test})
        for (const auto& ex : *set) {
            const VectorXd p = nn::predict_window(first.model, ex.input.channels);
            const VectorXd q = nn::predict_window(second.model, ex.input.channels);
            identical += p.size() == q.size() && std::memcmp(p.data(), q.data(), sizeof(double) * p.size()) == 0;
            ++total;
        }
    v.check(total > 0 && identical == total, "checkpoint round trip: " + std::to_string(identical) + "/" +
                                                 std::to_string(total) + " forecasts bit-identical");
}

// 9 -------------------------------------------------------------------------
void synthetic_structure(Verdict& v) {
    SynthConfig sc;
    sc.days = 365;
    sc.noise_std = 0;
    sc.temp_noise_std = 0;
    const auto d = generate(sc);
    const VectorXd x = d.consumption.values().array() - d.consumption.values().mean();
    const VectorXd y = d.temperature.values().array() - d.temperature.values().mean();
    const double r = x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
    v.check(sc.temp_sensitivity < 0, "temp_sensitivity " + fmt(sc.temp_sensitivity));
    v.check(r < kCorrelationBound, "Pearson(consumption, temperature) over 365 days = " + fmt(r) + " < " +
                                       fmt(kCorrelationBound));
}

}  // namespace

int main() {
    guarded(1, "gradient oracle", gradient_oracle);
    guarded(2, "CWT oracle", cwt_oracle);
    guarded(3, "CWT properties", cwt_properties);
    guarded(4, "overfit", overfit);
    guarded(5, "end-to-end", end_to_end);
    guarded(6, "pipeline exactness", pipeline_exactness);
    guarded(7, "metrics", metrics);
    guarded(8, "determinism", determinism);
    guarded(9, "synthetic structure", synthetic_structure);
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
