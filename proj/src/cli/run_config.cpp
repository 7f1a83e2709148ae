#include "heatcast/cli.hpp"
#include "heatcast/io.hpp"

#include <charconv>
#include <filesystem>

namespace heatcast::cli {
namespace {

namespace fs = std::filesystem;

std::int64_t to_int(std::string_view key, std::string_view v) {
    std::int64_t out = 0;
    v = trim(v);
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" + std::string(v) + "'");
    return out;
}

double to_real(std::string_view key, std::string_view v) {
    double out = 0;
    if (!parse_double(v, out))
        throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" + std::string(v) + "'");
    return out;
}

std::vector<Index> to_list(std::string_view key, std::string_view v) {
    std::vector<Index> out;
    while (true) {
        const auto comma = v.find(',');
        out.push_back(Index(to_int(key, v.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

fs::path to_path(std::string_view v, const fs::path& base) {
    fs::path p{std::string(trim(v))};
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

std::string join(const std::vector<Index>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
    static const std::vector<std::string> keys{
        "consumption", "consumption_kind", "weather", "calendar", "model", "out_dir", "zone", "seed", "precision",
        "h", "n", "s", "train_days", "val_days", "test_days", "boundary", "support_radius_factor",
        "conv_widths", "kernel_size", "dense_widths", "leaky_slope", "dropout_rate", "learning_rate",
        "adam_beta1", "adam_beta2", "adam_eps", "batch_size", "max_epochs", "patience"};
    return keys;
}

void RunConfig::set(std::string_view key, std::string_view raw, const fs::path& base) {
    const auto v = trim(raw);
    auto& p = pipeline;
    auto& m = model_config;
    if (key == "consumption") consumption = to_path(v, base);
    else if (key == "consumption_kind") consumption_kind = parse_series_kind(v);
    else if (key == "weather") weather = to_path(v, base);
    else if (key == "calendar") calendar = to_path(v, base);
    else if (key == "model") model = to_path(v, base);
    else if (key == "out_dir") out_dir = to_path(v, base);
    else if (key == "zone") {
        if (v.empty() || v.find(',') != std::string_view::npos) throw ConfigError("zone must be a non-empty label without commas");
        zone = std::string(v);
    } else if (key == "seed") {
        const auto s = to_int(key, v);
        if (s < 0) throw ConfigError("seed must be non-negative");
        seed = std::uint64_t(s);
    } else if (key == "precision") {
        if (v == "double") precision = Precision::Double;
        else if (v == "float") precision = Precision::Float;
        else throw ConfigError("precision must be 'double' or 'float'");
    } else if (key == "h") p.history = Index(to_int(key, v));
    else if (key == "n") p.horizon = Index(to_int(key, v));
    else if (key == "s") p.scales = Index(to_int(key, v));
    else if (key == "train_days") p.split.train_days = int(to_int(key, v));
    else if (key == "val_days") p.split.val_days = int(to_int(key, v));
    else if (key == "test_days") p.split.test_days = int(to_int(key, v));
    else if (key == "boundary") p.boundary = parse_boundary(v);
    else if (key == "support_radius_factor") p.support_radius_factor = to_real(key, v);
    else if (key == "conv_widths") m.conv_widths = to_list(key, v);
    else if (key == "kernel_size") m.kernel_size = Index(to_int(key, v));
    else if (key == "dense_widths") m.dense_widths = to_list(key, v);
    else if (key == "leaky_slope") m.leaky_slope = to_real(key, v);
    else if (key == "dropout_rate") m.dropout_rate = to_real(key, v);
    else if (key == "learning_rate") m.learning_rate = to_real(key, v);
    else if (key == "adam_beta1") m.adam_beta1 = to_real(key, v);
    else if (key == "adam_beta2") m.adam_beta2 = to_real(key, v);
    else if (key == "adam_eps") m.adam_eps = to_real(key, v);
    else if (key == "batch_size") m.batch_size = Index(to_int(key, v));
    else if (key == "max_epochs") m.max_epochs = int(to_int(key, v));
    else if (key == "patience") m.patience = int(to_int(key, v));
    else throw ConfigError("unknown config key '" + std::string(key) + "'");

    // The network input follows the windowing settings.
    m.rows = p.scales;
    m.cols = p.history;
    m.output_size = p.horizon;
}

void RunConfig::validate(bool need_data) const {
    pipeline.validate();
    model_config.validate();
    if (model_config.rows != pipeline.scales || model_config.cols != pipeline.history ||
        model_config.output_size != pipeline.horizon)
        throw ConfigError("model input shape does not match h, n and s");
    if (!need_data) return;
    if (consumption.empty()) throw ConfigError("config is missing 'consumption'");
    if (weather.empty()) throw ConfigError("config is missing 'weather'");
    for (const auto* p : {&consumption, &weather})
        if (!fs::is_regular_file(*p)) throw IoError("input file not found: " + p->string());
    if (!calendar.empty() && !fs::is_regular_file(calendar))
        throw IoError("calendar file not found: " + calendar.string());
}

void apply_config_text(RunConfig& cfg, std::string_view text, const fs::path& base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1), base);
    }
}

std::string to_config_text(const RunConfig& c) {
    const auto& p = c.pipeline;
    const auto& m = c.model_config;
    std::string s;
    auto put = [&](std::string_view k, const std::string& v) { s += std::string(k) + "=" + v + "\n"; };
    put("consumption", c.consumption.string());
    put("consumption_kind", std::string(to_string(c.consumption_kind)));
    put("weather", c.weather.string());
    put("calendar", c.calendar.string());
    put("model", c.model.string());
    put("out_dir", c.out_dir.string());
    put("zone", c.zone);
    put("seed", std::to_string(c.seed));
    put("precision", c.precision == Precision::Float ? "float" : "double");
    put("h", std::to_string(p.history));
    put("n", std::to_string(p.horizon));
    put("s", std::to_string(p.scales));
    put("train_days", std::to_string(p.split.train_days));
    put("val_days", std::to_string(p.split.val_days));
    put("test_days", std::to_string(p.split.test_days));
    put("boundary", std::string(to_string(p.boundary)));
    put("support_radius_factor", format_double(p.support_radius_factor));
    put("conv_widths", join(m.conv_widths));
    put("kernel_size", std::to_string(m.kernel_size));
    put("dense_widths", join(m.dense_widths));
    put("leaky_slope", format_double(m.leaky_slope));
    put("dropout_rate", format_double(m.dropout_rate));
    put("learning_rate", format_double(m.learning_rate));
    put("adam_beta1", format_double(m.adam_beta1));
    put("adam_beta2", format_double(m.adam_beta2));
    put("adam_eps", format_double(m.adam_eps));
    put("batch_size", std::to_string(m.batch_size));
    put("max_epochs", std::to_string(m.max_epochs));
    put("patience", std::to_string(m.patience));
    return s;
}

}  // namespace heatcast::cli
