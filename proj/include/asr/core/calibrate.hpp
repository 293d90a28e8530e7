#pragma once

#include "asr/core/types.hpp"

namespace asr {

// Learns the clean-data subspace from `clean` (channels x samples):
//   1. shaping filter
//   2. robust (geometric-median) block covariance -> PSD square root M
//   3. eigenbasis V of M, component signals V^T * X
//   4. per-component windowed RMS -> median / MAD
//   5. T = diag(mu + k * sigma) * V^T
CalibrationState asr_calibrate(const Matrix& clean, double srate,
                               const CalibrationParams& params = {},
                               const FilterCoefficients& filter = {});

} // namespace asr
