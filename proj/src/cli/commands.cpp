#include "heatcast/cli.hpp"

#include "heatcast/io.hpp"
#include "heatcast/nn/checkpoint.hpp"
#include "heatcast/nn/train.hpp"
#include "heatcast/synthgen.hpp"
#include "heatcast/time.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace heatcast::cli {
namespace {

namespace fs = std::filesystem;

/// Flags every data-consuming subcommand understands.
struct CommonFlags {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string model;
    std::int64_t seed = -1;
    bool quiet = false;

    void attach(CLI::App* app) {
        app->add_option("--config,-c", config, "key=value run configuration file");
        app->add_option("--set", sets, "override a config key (key=value), repeatable");
        app->add_option("--out,-o", out, "output directory (default: $HEATCAST_OUT or .)");
        app->add_option("--model,-m", model, "checkpoint path");
        app->add_option("--seed", seed, "seed for every stochastic component");
        app->add_flag("--quiet,-q", quiet, "suppress progress output");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (const char* env = std::getenv("HEATCAST_OUT"); env && *env) cfg.out_dir = env;
        if (!config.empty()) {
            const fs::path path(config);
            if (!fs::is_regular_file(path)) throw IoError("config file not found: " + config);
            apply_config_text(cfg, read_file(path), path.parent_path());
        }
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            cfg.set(trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
        }
        if (!out.empty()) cfg.out_dir = out;
        if (!model.empty()) cfg.model = model;
        if (seed >= 0) cfg.seed = std::uint64_t(seed);
        return cfg;
    }
};

struct Inputs {
    HourlySeries consumption;
    HourlySeries weather;
    Calendar calendar;
};

HourlySeries load_series(const fs::path& path, SeriesKind kind) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return parse_series_csv(in, kind);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Inputs load_inputs(const RunConfig& cfg) {
    Calendar calendar;
    if (!cfg.calendar.empty()) {
        std::ifstream in(cfg.calendar);
        if (!in) throw IoError("cannot open " + cfg.calendar.string());
        try {
            calendar = parse_calendar_csv(in);
        } catch (const ParseError& e) {
            throw ParseError(cfg.calendar.string() + ": " + e.what());
        }
    }
    return {load_series(cfg.consumption, cfg.consumption_kind), load_series(cfg.weather, SeriesKind::Temperature),
            std::move(calendar)};
}

Timestamp parse_window_start(const std::string& text) {
    if (auto d = parse_date(text)) return Timestamp{*d};
    if (auto t = parse_timestamp(text)) return *t;
    throw ConfigError("expected a date (YYYY-MM-DD) or hour timestamp, got '" + text + "'");
}

/// Pipeline settings recorded in a checkpoint, with the split taken from the run config.
PipelineConfig pipeline_of(const nn::Model<double>& model, const RunConfig& cfg) {
    PipelineConfig p = cfg.pipeline;
    p.history = model.config.cols;
    p.horizon = model.config.output_size;
    p.scales = model.config.rows;
    p.boundary = model.wavelet.boundary;
    p.support_radius_factor = model.wavelet.support_radius_factor;
    return p;
}

template <typename F>
std::string render(F&& f) {
    std::ostringstream os;
    f(os);
    return std::move(os).str();
}

// ---------------------------------------------------------------------------

int cmd_synth(int days, std::uint64_t seed, int glitches, const std::string& start, const RunConfig& cfg,
              std::ostream& out) {
    SynthConfig sc;
    sc.days = days;
    sc.seed = seed;
    sc.glitch_count = glitches;
    if (!start.empty()) {
        const auto d = parse_date(start);
        if (!d) throw ConfigError("--start expects YYYY-MM-DD");
        sc.start = *d;
    }
    const auto data = generate(sc);
    const auto& dir = cfg.out_dir;
    write_file_atomic(dir / "consumption.csv", render([&](auto& os) { write_series_csv(os, data.consumption); }));
    write_file_atomic(dir / "weather.csv", render([&](auto& os) { write_series_csv(os, data.temperature); }));
    write_file_atomic(dir / "accumulated.csv", render([&](auto& os) { write_series_csv(os, data.accumulated); }));
    write_file_atomic(dir / "calendar.csv",
                      render([&](auto& os) { write_calendar_csv(os, data.calendar, sc.start, sc.days); }));
    RunConfig run;
    run.consumption = "consumption.csv";
    run.weather = "weather.csv";
    run.calendar = "calendar.csv";
    run.out_dir = ".";
    run.seed = seed;
    write_file_atomic(dir / "run.cfg", to_config_text(run));
    out << "wrote " << data.consumption.size() << " hourly rows per series and " << sc.days
        << " calendar days to " << dir.string() << '\n';
    return kOk;
}

int cmd_scalogram(const RunConfig& cfg, const std::string& start_text, std::ostream& out) {
    cfg.validate(true);
    const auto inputs = load_inputs(cfg);
    const auto [cons, wx] = align_inputs(inputs.consumption, inputs.weather);
    const Index h = cfg.pipeline.history;
    const Timestamp start = parse_window_start(start_text);
    const auto cs = scaler_fit(cons), ws = scaler_fit(wx);
    const Index offset = (start - cons.start()).count();
    if (offset < 0 || offset + 2 * h > cons.size())
        throw DataError("window " + format_timestamp(start) + " needs " + std::to_string(2 * h) + " hours of data");
    const CwtPlan<double> plan(cfg.pipeline.wavelet());
    const struct {
        const char* name;
        VectorXd window;
        SeriesKind kind;
    } items[] = {
        {"consumption", cs.transform(cons.values().segment(offset, h)), SeriesKind::Rate},
        {"past_weather", ws.transform(wx.values().segment(offset, h)), SeriesKind::Temperature},
        {"forecast_weather", ws.transform(wx.values().segment(offset + h, h)), SeriesKind::Temperature},
    };
    const auto stem = format_date(date_of(start));
    for (const auto& item : items) {
        const auto s = plan(item.window, item.kind);
        const auto base = cfg.out_dir / ("scalogram_" + std::string(item.name) + "_" + stem);
        write_file_atomic(fs::path(base) += ".csv", render([&](auto& os) { write_scalogram_csv(os, s); }));
        write_file_atomic(fs::path(base) += ".pgm", render([&](auto& os) { write_scalogram_pgm(os, s); }));
    }
    out << "wrote scalograms for window " << format_timestamp(start) << " to " << cfg.out_dir.string() << '\n';
    return kOk;
}

int cmd_train(const RunConfig& cfg, bool quiet, std::ostream& out, std::ostream& err) {
    cfg.validate(true);
    const auto inputs = load_inputs(cfg);
    const auto data = prepare_data(inputs.consumption, inputs.weather, inputs.calendar, cfg.pipeline);
    if (!quiet)
        err << "examples: train " << data.train.size() << ", val " << data.val.size() << ", test "
            << data.test.size() << '\n';
    const auto progress = [&](const nn::EpochRecord& e) {
        if (!quiet)
            err << "epoch " << e.epoch << " train_mse " << format_double(e.train_mse) << " val_mse "
                << format_double(e.val_mse) << '\n';
    };
    nn::TrainResult<double> result;
    if (cfg.precision == Precision::Float) {
        auto single = nn::train<float>(cfg.model_config, data.train, data.val, cfg.seed, progress);
        result = {single.params.cast<double>(), std::move(single.log)};
    } else {
        result = nn::train<double>(cfg.model_config, data.train, data.val, cfg.seed, progress);
    }

    nn::Checkpoint ckpt;
    ckpt.model.config = cfg.model_config;
    ckpt.model.params = result.params;
    ckpt.model.consumption_scaler = data.consumption_scaler;
    ckpt.model.weather_scaler = data.weather_scaler;
    ckpt.model.wavelet = cfg.pipeline.wavelet();
    ckpt.metadata = {{"seed", std::to_string(cfg.seed)},
                     {"zone", cfg.zone},
                     {"precision", cfg.precision == Precision::Float ? "float" : "double"},
                     {"best_epoch", std::to_string(result.log.best_epoch)},
                     {"best_val_mse", format_double(result.log.best_val_mse)},
                     {"epochs_run", std::to_string(result.log.epochs.size())},
                     {"train_examples", std::to_string(data.train.size())},
                     {"data_start", format_timestamp(data.consumption.start())}};
    const auto ckpt_path = cfg.checkpoint_path();
    nn::save_checkpoint(ckpt_path, ckpt);
    const auto log_path = cfg.out_dir / "training_log.csv";
    write_file_atomic(log_path, render([&](auto& os) { nn::write_training_log(os, result.log); }));
    out << "best epoch " << result.log.best_epoch << " val_mse " << format_double(result.log.best_val_mse)
        << "; checkpoint " << ckpt_path.string() << ", log " << log_path.string() << '\n';
    return kOk;
}

/// Forecast for one window over the full aligned series. Truth is left empty when the series ends first.
ForecastWindow forecast_at(const nn::Model<double>& model, const HourlySeries& cons, const HourlySeries& wx,
                           const Calendar& calendar, Timestamp start, const std::string& zone) {
    const Index h = model.config.cols;
    const CwtPlan<double> plan(model.wavelet);
    const auto input = make_input(scale_series(cons, model.consumption_scaler), scale_series(wx, model.weather_scaler),
                                  calendar, plan, h, start);
    const Index offset = (start - cons.start()).count() + h;
    VectorXd truth;
    if (offset + h <= cons.size()) truth = cons.values().segment(offset, h);
    return {start + std::chrono::hours{h}, zone, nn::predict_window(model, input.channels), std::move(truth)};
}

int cmd_predict(const RunConfig& cfg, const std::string& start_text, const std::string& target, std::ostream& out) {
    const auto ckpt = nn::load_checkpoint(cfg.checkpoint_path());
    RunConfig run = cfg;
    run.pipeline = pipeline_of(ckpt.model, cfg);
    run.model_config = ckpt.model.config;
    run.validate(true);
    const auto inputs = load_inputs(run);
    const auto [cons, wx] = align_inputs(inputs.consumption, inputs.weather);
    const auto w = forecast_at(ckpt.model, cons, wx, inputs.calendar, parse_window_start(start_text), run.zone);
    const auto text = render([&](auto& os) {
        os << "timestamp,kw\n";
        for (Index i = 0; i < w.prediction.size(); ++i)
            os << format_timestamp(w.window_start + std::chrono::hours{i}) << ',' << format_double(w.prediction[i])
               << '\n';
    });
    if (target.empty() || target == "-") out << text;
    else write_file_atomic(target, text);
    return kOk;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& against, std::ostream& out) {
    if (against != "naive" && against != "none") throw ConfigError("--against must be 'naive' or 'none'");
    const auto ckpt = nn::load_checkpoint(cfg.checkpoint_path());
    RunConfig run = cfg;
    run.pipeline = pipeline_of(ckpt.model, cfg);
    run.model_config = ckpt.model.config;
    run.validate(true);
    const auto inputs = load_inputs(run);
    const auto data = prepare_data(inputs.consumption, inputs.weather, inputs.calendar, run.pipeline,
                                   ckpt.model.consumption_scaler, ckpt.model.weather_scaler);
    const auto cnn = evaluate(model_forecasts(ckpt.model, data.test, data.raw.test[0], run.zone));
    std::vector<std::pair<std::string, const EvalReport*>> reports{{"cnn", &cnn}};
    write_file_atomic(run.out_dir / "report_cnn.csv", render([&](auto& os) { write_report_csv(os, cnn); }));
    EvalReport naive;
    if (against == "naive") {
        naive = evaluate(naive_forecasts(data.test, data.raw.test[0], run.zone));
        reports.emplace_back("naive", &naive);
        write_file_atomic(run.out_dir / "report_naive.csv", render([&](auto& os) { write_report_csv(os, naive); }));
    }
    const auto summary = render([&](auto& os) { write_summary_csv(os, reports); });
    write_file_atomic(run.out_dir / "summary.csv", summary);
    out << summary;
    return kOk;
}

int cmd_plot(const RunConfig& cfg, const std::string& start_text, std::ostream& out) {
    const auto ckpt = nn::load_checkpoint(cfg.checkpoint_path());
    RunConfig run = cfg;
    run.pipeline = pipeline_of(ckpt.model, cfg);
    run.model_config = ckpt.model.config;
    run.validate(true);
    const auto inputs = load_inputs(run);
    const Index h = run.pipeline.history;

    std::vector<ForecastWindow> windows, baselines;
    if (!start_text.empty()) {
        const auto [cons, wx] = align_inputs(inputs.consumption, inputs.weather);
        const Timestamp start = parse_window_start(start_text);
        windows.push_back(forecast_at(ckpt.model, cons, wx, inputs.calendar, start, run.zone));
        const Index offset = (start - cons.start()).count();
        baselines.push_back({windows.back().window_start, run.zone, cons.values().segment(offset, h), {}});
    } else {
        const auto data = prepare_data(inputs.consumption, inputs.weather, inputs.calendar, run.pipeline,
                                       ckpt.model.consumption_scaler, ckpt.model.weather_scaler);
        windows = model_forecasts(ckpt.model, data.test, data.raw.test[0], run.zone);
        baselines = naive_forecasts(data.test, data.raw.test[0], run.zone);
    }
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        const auto stem = "plot_" + format_date(date_of(w.window_start));
        const VectorXd& base = baselines[i].prediction;
        write_file_atomic(run.out_dir / (stem + ".csv"), render([&](auto& os) { write_plot_csv(os, w, &base); }));
        write_file_atomic(run.out_dir / (stem + ".svg"), render([&](auto& os) { write_plot_svg(os, w, &base); }));
    }
    out << "wrote " << windows.size() << " plot(s) to " << run.out_dir.string() << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"District-heating load forecasting from wavelet scalograms", "heatcast"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "emit a synthetic consumption/weather/calendar dataset");
    int days = 1090, glitches = 0;
    std::int64_t synth_seed = 7;
    std::string synth_out, synth_start;
    synth->add_option("--days", days, "number of days")->capture_default_str();
    synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
    synth->add_option("--glitches", glitches, "negative glitches injected into the accumulated reading");
    synth->add_option("--start", synth_start, "first day (YYYY-MM-DD), default 2015-01-01");
    synth->add_option("--out,-o", synth_out, "output directory (default: $HEATCAST_OUT or .)");

    CommonFlags scalo_flags, train_flags, predict_flags, eval_flags, plot_flags;
    std::string scalo_start, predict_start, predict_target, against = "naive", plot_start;

    auto* scalo = app.add_subcommand("scalogram", "write CSV and PGM scalograms of one window");
    scalo_flags.attach(scalo);
    scalo->add_option("--start,--date", scalo_start, "window start (history day)")->required();

    auto* train = app.add_subcommand("train", "clean, scale, assemble, train and checkpoint");
    train_flags.attach(train);

    auto* predict = app.add_subcommand("predict", "24-hour forecast for the window starting at --start");
    predict_flags.attach(predict);
    predict->add_option("--start,--date", predict_start, "window start (history day)")->required();
    predict->add_option("--output", predict_target, "forecast CSV path (default: stdout)");

    auto* eval = app.add_subcommand("evaluate", "test-set report, optionally against the seasonal-naive baseline");
    eval_flags.attach(eval);
    eval->add_option("--against", against, "naive|none")->capture_default_str();

    auto* plot = app.add_subcommand("plot", "truth-vs-prediction CSV and SVG per window");
    plot_flags.attach(plot);
    plot->add_option("--start,--date", plot_start, "single window start; default: every test window");

    std::vector<const char*> args;
    for (const auto& a : argv) args.push_back(a.c_str());
    if (args.empty()) args.push_back("heatcast");
    try {
        app.parse(int(args.size()), args.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*synth) {
            RunConfig cfg;
            if (const char* env = std::getenv("HEATCAST_OUT"); env && *env) cfg.out_dir = env;
            if (!synth_out.empty()) cfg.out_dir = synth_out;
            if (synth_seed < 0) throw ConfigError("--seed must be non-negative");
            return cmd_synth(days, std::uint64_t(synth_seed), glitches, synth_start, cfg, out);
        }
        if (*scalo) return cmd_scalogram(scalo_flags.resolve(), scalo_start, out);
        if (*train) return cmd_train(train_flags.resolve(), train_flags.quiet, out, err);
        if (*predict) return cmd_predict(predict_flags.resolve(), predict_start, predict_target, out);
        if (*eval) return cmd_evaluate(eval_flags.resolve(), against, out);
        if (*plot) return cmd_plot(plot_flags.resolve(), plot_start, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigInvalid;
    } catch (const IoError& e) {
        err << "file error: " << e.what() << '\n';
        return kFileError;
    } catch (const CheckpointError& e) {
        err << "checkpoint error: " << e.what() << '\n';
        return kCheckpointError;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kDataError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace heatcast::cli
