#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace asr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A block of samples, channels along rows and samples along columns.
struct MultichannelChunk {
  Matrix data;
  double srate{0.0};
  std::int64_t first_sample_index{0};

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index samples() const { return data.cols(); }
};

struct CalibrationParams {
  double cutoff{5.0};             // standard-deviation multiplier k
  int blocksize{10};              // samples per covariance block
  double window_len{0.5};         // seconds
  double window_overlap{0.66};    // fraction in [0, 1)
  double max_dims_fraction{0.66}; // fraction in (0, 1]

  // Throws InvalidValue naming the offending field.
  void validate() const;
};

// Shaping filter. Coefficients are normalized so that a[0] == 1.
struct FilterCoefficients {
  std::vector<double> b{1.0};
  std::vector<double> a{1.0};

  std::size_t order() const;
  bool is_identity() const;
  // Divides b and a by a[0]. Throws InvalidInput for a[0] == 0 or empty lists.
  void normalize();
};

struct CalibrationState {
  Matrix mixing;    // M: PSD square root of the robust calibration covariance
  Matrix threshold; // T: diag(mu + k*sigma) * V^T
  FilterCoefficients filter;
  CalibrationParams params;
  double srate{0.0};

  Eigen::Index channels() const { return mixing.rows(); }
  // round(window_len * srate)
  Eigen::Index window_samples() const;
};

struct ReconstructionUpdate {
  Vector eigvals;          // ascending
  Matrix eigvecs;          // orthonormal columns
  std::vector<bool> keep;  // one flag per component
  Matrix reconstruction;   // R
  int n_rejected{0};
};

// floor(fraction * channels), guarded against representation error so that
// e.g. 0.29 * 100 yields 29.
int rejection_budget(double max_dims_fraction, Eigen::Index channels);

// Window samples must be at least 1.5x the channel count. Throws WindowTooShort.
void check_window_rule(double window_len, double srate, Eigen::Index channels);

} // namespace asr
