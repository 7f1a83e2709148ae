#pragma once

#include "heatcast/nn/model.hpp"
#include "heatcast/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace heatcast::cli {

/// Arithmetic used for training. Checkpoints and serving always use double.
enum class Precision { Double, Float };

/// Everything a subcommand needs. Built from defaults, then a `key=value` config file, then
/// command-line overrides, in that order of precedence.
struct RunConfig {
    std::filesystem::path consumption;
    SeriesKind consumption_kind = SeriesKind::Rate;
    std::filesystem::path weather;
    std::filesystem::path calendar;  // optional
    std::filesystem::path model;     // checkpoint; defaults to <out_dir>/model.ckpt
    std::filesystem::path out_dir = ".";
    std::string zone = "zone1";
    std::uint64_t seed = 7;
    Precision precision = Precision::Double;
    PipelineConfig pipeline;
    nn::ModelConfig model_config;

    std::filesystem::path checkpoint_path() const { return model.empty() ? out_dir / "model.ckpt" : model; }

    /// Applies one `key=value` setting. Relative paths resolve against `base`.
    void set(std::string_view key, std::string_view value, const std::filesystem::path& base = {});

    /// h = n, shapes consistent, and every listed input file exists.
    void validate(bool need_data) const;
};

/// Keys accepted by RunConfig::set, in documentation order.
const std::vector<std::string>& run_config_keys();

/// Parses a flat config file: `key=value` lines, `#` comments, blank lines ignored.
void apply_config_text(RunConfig& cfg, std::string_view text, const std::filesystem::path& base = {});

/// Serialises every key, one `key=value` per line.
std::string to_config_text(const RunConfig& cfg);

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kConfigInvalid = 3,
    kFileError = 4,
    kDataError = 5,
    kCheckpointError = 6,
};

/// Entry point shared by the executable and the tests. argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace heatcast::cli
