#include "asr/core/calibrate.hpp"

#include "asr/core/error.hpp"
#include "asr/core/filter.hpp"
#include "asr/core/linalg.hpp"
#include "asr/core/robust.hpp"

#include <cmath>
#include <span>
#include <string>

namespace asr {

CalibrationState asr_calibrate(const Matrix& clean, double srate, const CalibrationParams& params,
                               const FilterCoefficients& filter) {
  params.validate();
  if (!(srate > 0.0) || !std::isfinite(srate))
    throw Error(ErrorCode::InvalidValue, "sampling rate must be > 0");
  if (clean.rows() < 1 || clean.cols() < 1)
    throw Error(ErrorCode::EmptyInput, "calibration data is empty");
  if (!all_finite(clean)) throw Error(ErrorCode::InvalidInput, "calibration data contains NaN/Inf");

  const Eigen::Index channels = clean.rows();
  check_window_rule(params.window_len, srate, channels);
  const WindowGeometry window = window_geometry(srate, params.window_len, params.window_overlap);
  if (clean.cols() < window.length)
    throw Error(ErrorCode::InsufficientData,
                "calibration data (" + std::to_string(clean.cols()) +
                    " samples) is shorter than one statistics window (" +
                    std::to_string(window.length) + " samples)");

  CalibrationState state;
  state.params = params;
  state.srate = srate;
  state.filter = filter;
  state.filter.normalize();

  IirFilterState fstate(state.filter, channels);
  const Matrix filtered = iir_filter(clean, state.filter, fstate);

  const Matrix cov = robust_covariance(filtered, params.blocksize);
  state.mixing = matrix_sqrt_psd(cov);
  const Matrix basis = symmetric_eig(state.mixing).vectors;

  // Component signals, one per column.
  const Matrix components = filtered.transpose() * basis;
  Vector thresholds(channels);
  for (Eigen::Index c = 0; c < channels; ++c) {
    const auto col = components.col(c);
    const std::vector<double> rms =
        sliding_rms(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                    srate, params.window_len, params.window_overlap);
    if (rms.size() < kMinRmsWindows)
      throw Error(ErrorCode::InsufficientData,
                  "calibration yields " + std::to_string(rms.size()) +
                      " RMS windows; at least " + std::to_string(kMinRmsWindows) + " are needed");
    const RobustStats stats = robust_stats(rms);
    thresholds(c) = stats.mu + params.cutoff * stats.sigma;
  }
  state.threshold = thresholds.asDiagonal() * basis.transpose();
  return state;
}

} // namespace asr
