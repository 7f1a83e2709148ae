#pragma once

#include "heatcast/nn/model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace heatcast::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Checkpoint layout (all integers little-endian):
///   8-byte magic "HEATCKPT", u32 format_version, u64 header length, header text of `key=value`
///   lines (model config, wavelet settings, scalers, layer shapes, metadata), u64 tensor count,
///   per tensor u64 rows, u64 cols and rows*cols IEEE-754 binary64 values in row-major order,
///   then a u64 FNV-1a hash of every preceding byte.
struct Checkpoint {
    Model<double> model;
    std::map<std::string, std::string> metadata;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace heatcast::nn
