#pragma once

#include "asr/core/filter.hpp"
#include "asr/core/types.hpp"

#include <cstdint>

namespace asr {

struct ProcessParams {
  int stepsize{32};  // samples between reconstruction updates
  int lookahead{-1}; // samples; negative selects round(window_samples / 2)
};

// Mutable streaming state of one processing sequence. Everything is sized at
// construction so that per-sample work does not allocate; only the
// reconstruction update (every `stepsize` samples) allocates.
struct ProcessorState {
  IirFilterState filter_state;
  Matrix delay_buffer; // C x L ring of raw samples
  Eigen::Index delay_pos{0};
  Matrix cov_window; // C x W ring of filtered samples, zero-filled at start
  Eigen::Index window_pos{0};
  Matrix r_current;
  Matrix r_previous;
  bool current_is_identity{true};
  bool previous_is_identity{true};
  int samples_since_update{0};
  int stepsize{32};
  std::int64_t total_samples_seen{0};

  // Monitoring counters.
  std::int64_t update_count{0};
  std::int64_t identity_update_count{0};
  int last_n_rejected{0};

  // Scratch space.
  Vector raw;
  Vector filtered;
  Vector out;
  Matrix blend;
  Matrix cov;

  ProcessorState() = default;
  ProcessorState(const CalibrationState& calib, const ProcessParams& params = {});

  Eigen::Index channels() const { return cov_window.rows(); }
  Eigen::Index lookahead() const { return delay_buffer.cols(); }
  Eigen::Index window_samples() const { return cov_window.cols(); }

  // (1/n) * sum of outer products over the covariance window, where
  // n = min(total_samples_seen, W).
  Matrix window_covariance() const;
};

// Cleans `data` (channels x samples) in place. The output lags the input by
// exactly state.lookahead() samples. The whole block is checked for
// finiteness before any state changes (InvalidInput); a wrong channel count
// is ChannelMismatch.
void asr_process_inplace(Eigen::Ref<Matrix> data, const CalibrationState& calib,
                         ProcessorState& state);

// Same as above on a chunk; the sampling rate must match the calibration.
MultichannelChunk asr_process_chunk(const MultichannelChunk& chunk,
                                    const CalibrationState& calib, ProcessorState& state);

// Owning convenience wrapper.
class Processor {
public:
  explicit Processor(CalibrationState calib, const ProcessParams& params = {});

  MultichannelChunk process(const MultichannelChunk& chunk);
  void process_inplace(Eigen::Ref<Matrix> data);

  const CalibrationState& calibration() const { return calib_; }
  const ProcessorState& state() const { return state_; }

private:
  CalibrationState calib_;
  ProcessorState state_;
};

} // namespace asr
