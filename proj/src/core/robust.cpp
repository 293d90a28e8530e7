#include "asr/core/robust.hpp"

#include "asr/core/error.hpp"
#include "asr/core/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace asr {

Vector geometric_median(const Matrix& points, double tol, int max_iter) {
  if (points.cols() == 0 || points.rows() == 0)
    throw Error(ErrorCode::EmptyInput, "geometric_median needs at least one point");
  if (!all_finite(points)) throw Error(ErrorCode::InvalidInput, "geometric_median: non-finite point");

  Vector estimate = points.rowwise().mean();
  Vector pull(points.rows());
  for (int iter = 0; iter < max_iter; ++iter) {
    pull.setZero();
    double weight = 0.0;
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      const double dist = (points.col(i) - estimate).norm();
      if (dist == 0.0) continue;
      pull += (points.col(i) - estimate) / dist;
      weight += 1.0 / dist;
    }
    if (weight == 0.0) break; // every point coincides with the estimate
    const Vector step = pull / weight;
    estimate += step;
    if (step.norm() < tol * (1.0 + estimate.norm())) break;
  }
  return estimate;
}

Matrix robust_covariance(const Matrix& filtered, int blocksize) {
  if (blocksize < 1) throw Error(ErrorCode::InvalidInput, "blocksize must be >= 1");
  const Eigen::Index channels = filtered.rows();
  const Eigen::Index blocks = filtered.cols() / blocksize;
  if (blocks < 1)
    throw Error(ErrorCode::InsufficientData,
                "need at least one block of " + std::to_string(blocksize) + " samples");

  // Column k holds the column-major flattening of block k's mean outer
  // product. Plain loops keep the sum order fixed, so each entry (i, j)
  // equals entry (j, i) bit for bit.
  Matrix flattened = Matrix::Zero(channels * channels, blocks);
  for (Eigen::Index k = 0; k < blocks; ++k) {
    auto out = flattened.col(k);
    for (Eigen::Index s = k * blocksize; s < (k + 1) * blocksize; ++s) {
      const auto x = filtered.col(s);
      for (Eigen::Index j = 0; j < channels; ++j)
        for (Eigen::Index i = 0; i < channels; ++i) out(j * channels + i) += x(i) * x(j);
    }
    out /= static_cast<double>(blocksize);
  }
  Matrix cov = geometric_median(flattened).reshaped(channels, channels);
  return 0.5 * (cov + cov.transpose());
}

WindowGeometry window_geometry(double srate, double window_len, double window_overlap) {
  WindowGeometry g;
  g.length = static_cast<Eigen::Index>(std::lround(window_len * srate));
  g.stride = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::lround(static_cast<double>(g.length) * (1.0 - window_overlap))));
  return g;
}

std::vector<double> sliding_rms(std::span<const double> signal, double srate, double window_len,
                                double window_overlap) {
  const WindowGeometry g = window_geometry(srate, window_len, window_overlap);
  if (g.length < 2)
    throw Error(ErrorCode::InvalidInput, "RMS window must span at least 2 samples");
  const auto n = static_cast<Eigen::Index>(signal.size());
  if (n < g.length)
    throw Error(ErrorCode::InsufficientData,
                "signal of " + std::to_string(n) + " samples is shorter than the " +
                    std::to_string(g.length) + "-sample window");

  const Eigen::Index count = (n - g.length) / g.stride + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index w = 0; w < count; ++w) {
    const auto begin = static_cast<std::size_t>(w * g.stride);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < g.length; ++i) {
      const double v = signal[begin + static_cast<std::size_t>(i)];
      sum += v * v;
    }
    out.push_back(std::sqrt(sum / static_cast<double>(g.length)));
  }
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

} // namespace

RobustStats robust_stats(std::span<const double> values) {
  if (values.empty())
    throw Error(ErrorCode::InsufficientData, "robust statistics need at least one value");
  RobustStats s;
  s.mu = median_of({values.begin(), values.end()});
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(),
                 [&](double x) { return std::abs(x - s.mu); });
  s.sigma = kMadToSigma * median_of(std::move(dev));
  return s;
}

} // namespace asr
