#pragma once

#include "asr/core/types.hpp"

#include <span>
#include <vector>

namespace asr {

inline constexpr double kGeometricMedianTol = 1e-12;
inline constexpr int kGeometricMedianMaxIter = 10000;
inline constexpr double kMadToSigma = 1.4826;
inline constexpr std::size_t kMinRmsWindows = 8;

// Weiszfeld iteration started from the coordinate-wise mean. `points` holds
// one d-dimensional point per column. Terms whose point coincides with the
// current estimate are skipped. Stops when the step norm drops below
// tol * (1 + ||estimate||) or after max_iter steps.
Vector geometric_median(const Matrix& points, double tol = kGeometricMedianTol,
                        int max_iter = kGeometricMedianMaxIter);

// Geometric median of the per-block mean outer products of `filtered`
// (channels x samples), using floor(N / blocksize) consecutive blocks.
// The result is symmetrized.
Matrix robust_covariance(const Matrix& filtered, int blocksize);

struct WindowGeometry {
  Eigen::Index length{0}; // round(window_len * srate)
  Eigen::Index stride{0}; // max(1, round(length * (1 - overlap)))
};

WindowGeometry window_geometry(double srate, double window_len, double window_overlap);

// RMS over windows of a single component signal.
std::vector<double> sliding_rms(std::span<const double> signal, double srate,
                                double window_len, double window_overlap);

struct RobustStats {
  double mu{0.0};
  double sigma{0.0};
};

// Median and 1.4826 * MAD of a non-empty list. Calibration additionally
// requires kMinRmsWindows values per component.
RobustStats robust_stats(std::span<const double> values);

} // namespace asr
