#pragma once

#include "asr/core/processor.hpp"
#include "asr/core/types.hpp"
#include "asr/runtime/config.hpp"
#include "asr/runtime/pipeline.hpp"

namespace asr::validation {

// Streams `recording` through asr_process_chunk in chunks of `chunk` samples
// and concatenates the outputs.
Matrix process_in_chunks(const Matrix& recording, const CalibrationState& calib,
                         const ProcessParams& params, Eigen::Index chunk);

struct RuntimeRun {
  Matrix output;
  runtime::PipelineCounters counters;
};

// Drives a full prepare/process/release cycle over `recording`, feeding
// `chunk` samples per process() call. The caller waits for the worker when
// the inbound FIFO is close to full, so no chunk is dropped; trailing output
// is collected until every accepted chunk has been delivered.
RuntimeRun process_with_runtime(const Matrix& recording, const runtime::PipelineConfig& config,
                                Eigen::Index chunk);

} // namespace asr::validation
