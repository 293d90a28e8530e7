#pragma once

#include "asr/runtime/config.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace asr::io {

// Key=Value lines, '#' comments. Required keys: SamplingRate, WindowLength,
// VarName, CalibrationFileName. Optional: OutputVarName, ChunkCapacity,
// FifoCapacity, Cutoff, BlockSize, WindowOverlap, MaxDimsFraction, StepSize,
// Lookahead, FilterB, FilterA.
// Errors: MissingKey(name), InvalidValue(name: reason), ParseError(line) for
// malformed lines, unknown or duplicated keys.
runtime::PipelineConfig parse_config(std::string_view text);
runtime::PipelineConfig load_config(const std::filesystem::path& path);

// Checks every constraint that does not depend on the channel count.
void validate_config(const runtime::PipelineConfig& cfg);

} // namespace asr::io
