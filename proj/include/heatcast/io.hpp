#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace heatcast {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Parses a whole field as a finite double; false on trailing garbage or non-finite values.
bool parse_double(std::string_view text, double& out);

std::string_view trim(std::string_view text);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace heatcast
