#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace asr::io {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so a failed
// write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Splits on '\n', dropping a trailing '\r' from each line. A final newline
// does not produce an empty trailing line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string_view trim(std::string_view s);

// Locale-independent number parsing/formatting. format_double produces the
// shortest representation that parses back to the identical value.
bool parse_double(std::string_view s, double& out);
std::string format_double(double v);

} // namespace asr::io
