#pragma once

#include "asr/core/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace asr::io {

inline constexpr int kStateFileVersion = 1;

// Versioned text serialization of a CalibrationState. Numbers are written
// in shortest round-trip form, so load(save(s)) reproduces every value.
std::string format_calibration_state(const CalibrationState& s);
CalibrationState parse_calibration_state(std::string_view text);

void save_calibration_state(const std::filesystem::path& path, const CalibrationState& s);
CalibrationState load_calibration_state(const std::filesystem::path& path);

// True if the text starts with the state-file magic line.
bool looks_like_state_file(std::string_view text);

} // namespace asr::io
