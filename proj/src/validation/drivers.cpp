#include "asr/validation/drivers.hpp"

#include "asr/core/error.hpp"

#include <chrono>
#include <thread>

namespace asr::validation {

Matrix process_in_chunks(const Matrix& recording, const CalibrationState& calib,
                         const ProcessParams& params, Eigen::Index chunk) {
  if (chunk < 1) throw Error(ErrorCode::InvalidValue, "chunk size must be >= 1");
  ProcessorState state(calib, params);
  Matrix out(recording.rows(), recording.cols());
  for (Eigen::Index off = 0; off < recording.cols(); off += chunk) {
    const Eigen::Index len = std::min(chunk, recording.cols() - off);
    MultichannelChunk in{recording.middleCols(off, len), calib.srate, off};
    out.middleCols(off, len) = asr_process_chunk(in, calib, state).data;
  }
  return out;
}

RuntimeRun process_with_runtime(const Matrix& recording, const runtime::PipelineConfig& config,
                                Eigen::Index chunk) {
  if (chunk < 1) throw Error(ErrorCode::InvalidValue, "chunk size must be >= 1");
  runtime::SideChannelRegistry registry;
  registry.register_variable(config.var_name, recording.rows(), chunk);
  runtime::Pipeline pipeline;
  pipeline.prepare(config, registry);
  const runtime::SideChannelVariable& output = *registry.find(config.resolved_output_name());

  RuntimeRun run;
  run.output.resize(recording.rows(), recording.cols());
  Eigen::Index written = 0;
  const auto collect = [&] {
    const Eigen::Index n = output.samples;
    if (written + n > run.output.cols())
      throw Error(ErrorCode::ShapeMismatch, "runtime produced more samples than it was given");
    run.output.middleCols(written, n) = output.view();
    written += n;
  };
  const auto cycle_empty = [&] {
    registry.at(config.var_name).samples = 0;
    pipeline.process();
    collect();
  };

  const auto cap = static_cast<Eigen::Index>(config.chunk_capacity);
  const std::int64_t pieces = (chunk + cap - 1) / cap;
  const auto fifo = static_cast<std::int64_t>(config.fifo_capacity);
  for (Eigen::Index off = 0; off < recording.cols(); off += chunk) {
    while (pipeline.counters().in_flight() + pieces > fifo) {
      cycle_empty();
      std::this_thread::sleep_for(std::chrono::microseconds(50));
    }
    const Eigen::Index len = std::min(chunk, recording.cols() - off);
    registry.write(config.var_name, recording.middleCols(off, len));
    pipeline.process();
    collect();
  }
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(30);
  while (pipeline.counters().in_flight() > 0) {
    if (std::chrono::steady_clock::now() > deadline)
      throw Error(ErrorCode::InvalidLifecycle, "runtime did not drain within 30 s");
    cycle_empty();
    std::this_thread::sleep_for(std::chrono::microseconds(50));
  }
  run.counters = pipeline.counters();
  pipeline.release();
  run.output.conservativeResize(Eigen::NoChange, written);
  return run;
}

} // namespace asr::validation
