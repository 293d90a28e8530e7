#pragma once

#include "asr/core/processor.hpp"
#include "asr/core/types.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace asr::runtime {

// Runtime configuration. The first four fields are the plugin-level
// variables; the rest are algorithm and buffering parameters with defaults.
struct PipelineConfig {
  double sampling_rate{0.0};       // Hz
  double window_length{0.5};       // seconds
  std::string var_name;            // input side-channel variable
  std::string calibration_file_name;

  std::string output_var_name;     // empty selects var_name + "_clean"
  std::size_t chunk_capacity{256}; // samples per FIFO slot
  std::size_t fifo_capacity{8};    // slots per FIFO

  CalibrationParams calibration;   // window_len is overridden by window_length
  ProcessParams processing;
  std::optional<FilterCoefficients> filter;

  std::string resolved_output_name() const {
    return output_var_name.empty() ? var_name + "_clean" : output_var_name;
  }

  CalibrationParams effective_calibration_params() const {
    CalibrationParams p = calibration;
    p.window_len = window_length;
    return p;
  }
};

} // namespace asr::runtime
