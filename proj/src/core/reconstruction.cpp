#include "asr/core/reconstruction.hpp"

#include "asr/core/error.hpp"
#include "asr/core/linalg.hpp"

namespace asr {

ReconstructionUpdate update_reconstruction(const Matrix& cov, const CalibrationState& calib,
                                           double max_dims_fraction) {
  const Eigen::Index channels = calib.channels();
  if (cov.rows() != channels || cov.cols() != channels)
    throw Error(ErrorCode::ChannelMismatch, "covariance does not match calibration channels");
  if (!all_finite(cov)) throw Error(ErrorCode::InvalidInput, "covariance contains NaN/Inf");

  ReconstructionUpdate up;
  SymmetricEigen eig = symmetric_eig(cov);
  up.eigvals = std::move(eig.values);
  up.eigvecs = std::move(eig.vectors);

  const int budget = rejection_budget(max_dims_fraction, channels);
  const Eigen::Index always_kept = channels - budget;
  // Squared threshold of each window component: ||T v_j||^2.
  const Vector limits = (calib.threshold * up.eigvecs).colwise().squaredNorm().transpose();

  up.keep.assign(static_cast<std::size_t>(channels), true);
  for (Eigen::Index j = always_kept; j < channels; ++j) {
    if (up.eigvals(j) > limits(j)) {
      up.keep[static_cast<std::size_t>(j)] = false;
      ++up.n_rejected;
    }
  }

  if (up.n_rejected == 0) {
    up.reconstruction = Matrix::Identity(channels, channels);
    return up;
  }

  Matrix projected = up.eigvecs.transpose() * calib.mixing;
  for (Eigen::Index j = 0; j < channels; ++j)
    if (!up.keep[static_cast<std::size_t>(j)]) projected.row(j).setZero();
  up.reconstruction = calib.mixing * pinv(projected, kPinvRelTol) * up.eigvecs.transpose();
  return up;
}

} // namespace asr
