#pragma once

#include "asr/core/processor.hpp"
#include "asr/core/types.hpp"
#include "asr/runtime/chunk_fifo.hpp"
#include "asr/runtime/config.hpp"
#include "asr/runtime/registry.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <thread>

namespace asr::runtime {

struct PipelineCounters {
  std::int64_t chunks_in{0};
  std::int64_t chunks_out{0};
  std::int64_t chunks_dropped{0};
  std::int64_t chunk_errors{0};
  std::int64_t samples_in{0};
  std::int64_t samples_out{0};

  // Chunks accepted but not yet delivered: inbound queue, worker, outbound queue.
  std::int64_t in_flight() const { return chunks_in - chunks_out - chunks_dropped; }
};

// Plugin-style host adapter with a prepare/process/release lifecycle.
//
// prepare() loads or computes the calibration, sizes every buffer, locks
// the input and output variables and starts the cleaning thread. process()
// is meant for the real-time caller: it copies the current input variable
// into the inbound FIFO and drains cleaned chunks into the output variable,
// without allocating, locking or waiting. release() stops and joins the
// worker and unlocks the variables.
class Pipeline {
public:
  Pipeline() = default;
  ~Pipeline();

  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  void prepare(const PipelineConfig& config, SideChannelRegistry& registry);

  // Returns the number of cleaned samples written to the output variable.
  Eigen::Index process();

  void release();

  bool prepared() const { return prepared_; }
  PipelineCounters counters() const;
  const CalibrationState& calibration() const;
  const PipelineConfig& config() const { return config_; }
  Eigen::Index lookahead() const { return lookahead_; }
  std::chrono::microseconds last_join_time() const { return last_join_; }

  // Test hook: a paused worker stops popping the inbound FIFO.
  void set_worker_paused(bool paused) { worker_paused_.store(paused); }

private:
  void worker_loop();

  bool prepared_{false};
  PipelineConfig config_;
  SideChannelRegistry* registry_{nullptr};
  SideChannelVariable* input_{nullptr};
  SideChannelVariable* output_{nullptr};
  std::shared_ptr<const CalibrationState> calib_;
  std::unique_ptr<ChunkFifo> inbound_;
  std::unique_ptr<ChunkFifo> outbound_;
  std::unique_ptr<ProcessorState> processor_;
  Matrix work_;
  Matrix backup_;
  Eigen::Index lookahead_{0};
  std::int64_t next_sample_index_{0};

  std::thread worker_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> worker_paused_{false};
  std::atomic<std::int64_t> chunks_in_{0};
  std::atomic<std::int64_t> chunks_out_{0};
  std::atomic<std::int64_t> chunks_dropped_{0};
  std::atomic<std::int64_t> chunk_errors_{0};
  std::atomic<std::int64_t> samples_in_{0};
  std::atomic<std::int64_t> samples_out_{0};
  std::chrono::microseconds last_join_{0};
};

// Loads the calibration named by the config: a saved state file is used
// as-is, a CSV recording is calibrated with the config's parameters. Errors
// are PrepareFailed, except the window rule (WindowTooShort).
CalibrationState load_or_calibrate(const PipelineConfig& config);

} // namespace asr::runtime
