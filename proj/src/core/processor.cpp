#include "asr/core/processor.hpp"

#include "asr/core/error.hpp"
#include "asr/core/linalg.hpp"
#include "asr/core/reconstruction.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace asr {

ProcessorState::ProcessorState(const CalibrationState& calib, const ProcessParams& params) {
  const Eigen::Index c = calib.channels();
  if (c < 1 || calib.threshold.rows() != c || calib.threshold.cols() != c)
    throw Error(ErrorCode::InvalidInput, "calibration state is not initialized");
  if (params.stepsize < 1) throw Error(ErrorCode::InvalidValue, "stepsize must be >= 1");

  const Eigen::Index window = calib.window_samples();
  if (window < 1) throw Error(ErrorCode::WindowTooShort, "statistics window is empty");
  const Eigen::Index lookahead =
      params.lookahead >= 0 ? params.lookahead
                            : static_cast<Eigen::Index>(std::lround(static_cast<double>(window) / 2.0));

  filter_state = IirFilterState(calib.filter, c);
  delay_buffer = Matrix::Zero(c, lookahead);
  cov_window = Matrix::Zero(c, window);
  r_current = Matrix::Identity(c, c);
  r_previous = Matrix::Identity(c, c);
  stepsize = params.stepsize;

  raw = Vector::Zero(c);
  filtered = Vector::Zero(c);
  out = Vector::Zero(c);
  blend = Matrix::Zero(c, c);
  cov = Matrix::Zero(c, c);
}

Matrix ProcessorState::window_covariance() const {
  const Eigen::Index c = channels();
  const auto seen = std::min<std::int64_t>(total_samples_seen, window_samples());
  Matrix result = Matrix::Zero(c, c);
  if (seen == 0) return result;
  result.selfadjointView<Eigen::Lower>().rankUpdate(cov_window, 1.0 / static_cast<double>(seen));
  result.triangularView<Eigen::StrictlyUpper>() = result.transpose();
  return result;
}

namespace {

void advance_one(Eigen::Ref<Vector> sample, const CalibrationState& calib, ProcessorState& st) {
  st.raw = sample;

  // Lookahead delay line.
  const Eigen::Index lookahead = st.delay_buffer.cols();
  if (lookahead > 0) {
    sample = st.delay_buffer.col(st.delay_pos);
    st.delay_buffer.col(st.delay_pos) = st.raw;
    st.delay_pos = (st.delay_pos + 1) % lookahead;
  }

  st.filtered = st.raw;
  iir_filter_sample(st.filtered, calib.filter, st.filter_state);
  if (!st.filtered.allFinite())
    throw Error(ErrorCode::FilterDiverged, "non-finite filter output; coefficients are unstable");
  st.cov_window.col(st.window_pos) = st.filtered;
  st.window_pos = (st.window_pos + 1) % st.cov_window.cols();
  ++st.total_samples_seen;

  st.samples_since_update = static_cast<int>(st.total_samples_seen % st.stepsize);
  if (st.samples_since_update == 0) {
    st.cov = st.window_covariance();
    ReconstructionUpdate up = update_reconstruction(st.cov, calib);
    st.r_previous.swap(st.r_current);
    st.previous_is_identity = st.current_is_identity;
    st.r_current = std::move(up.reconstruction);
    st.current_is_identity = up.n_rejected == 0;
    st.last_n_rejected = up.n_rejected;
    ++st.update_count;
    if (up.n_rejected == 0) ++st.identity_update_count;
  }

  if (st.current_is_identity && st.previous_is_identity) return;

  const double w =
      0.5 * (1.0 - std::cos(std::numbers::pi * (st.samples_since_update + 1) / st.stepsize));
  st.blend = w * st.r_current + (1.0 - w) * st.r_previous;
  st.out.noalias() = st.blend * sample;
  sample = st.out;
}

} // namespace

void asr_process_inplace(Eigen::Ref<Matrix> data, const CalibrationState& calib,
                         ProcessorState& state) {
  if (data.cols() == 0) return;
  if (data.rows() != calib.channels() || data.rows() != state.channels())
    throw Error(ErrorCode::ChannelMismatch,
                "chunk has " + std::to_string(data.rows()) + " channels, calibration has " +
                    std::to_string(calib.channels()));
  if (!data.allFinite()) throw Error(ErrorCode::InvalidInput, "chunk contains NaN/Inf");
  for (Eigen::Index s = 0; s < data.cols(); ++s) advance_one(data.col(s), calib, state);
}

MultichannelChunk asr_process_chunk(const MultichannelChunk& chunk, const CalibrationState& calib,
                                    ProcessorState& state) {
  if (chunk.samples() == 0) return chunk;
  if (std::abs(chunk.srate - calib.srate) > 1e-9 * calib.srate)
    throw Error(ErrorCode::InvalidInput, "chunk sampling rate does not match calibration");
  MultichannelChunk out = chunk;
  asr_process_inplace(out.data, calib, state);
  return out;
}

Processor::Processor(CalibrationState calib, const ProcessParams& params)
    : calib_(std::move(calib)), state_(calib_, params) {}

MultichannelChunk Processor::process(const MultichannelChunk& chunk) {
  return asr_process_chunk(chunk, calib_, state_);
}

void Processor::process_inplace(Eigen::Ref<Matrix> data) {
  asr_process_inplace(data, calib_, state_);
}

} // namespace asr
