#pragma once

#include "asr/core/types.hpp"

namespace asr {

inline constexpr double kPinvRelTol = 1e-12;

// Detection and correction operator for one window covariance. Component j
// (ascending eigenvalue order) is kept when its variance is within the
// calibrated threshold ||T v_j||^2, or when it falls outside the rejection
// budget (the C - floor(max_dims_fraction * C) smallest are always kept).
// R is exactly the identity when nothing is rejected, otherwise
// M * pinv(K o (V^T M)) * V^T with the rejected rows zeroed by K.
ReconstructionUpdate update_reconstruction(const Matrix& cov, const CalibrationState& calib,
                                           double max_dims_fraction);

inline ReconstructionUpdate update_reconstruction(const Matrix& cov,
                                                  const CalibrationState& calib) {
  return update_reconstruction(cov, calib, calib.params.max_dims_fraction);
}

} // namespace asr
