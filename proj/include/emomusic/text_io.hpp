#pragma once

// Small helpers for the delimited-text formats used across the library.

#include <charconv>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emomusic::text {

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary file and rename so readers never see a partial file.
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char delimiter);
std::vector<std::string_view> lines(std::string_view text);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest representation that round-trips exactly.
std::string format_double(double value);

}  // namespace emomusic::text
