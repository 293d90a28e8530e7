#include "asr/core/types.hpp"

#include "asr/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace asr {

void CalibrationParams::validate() const {
  auto fail = [](const char* name, const char* rule) {
    throw Error(ErrorCode::InvalidValue, std::string(name) + " must satisfy " + rule);
  };
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) fail("cutoff", "k > 0");
  if (blocksize < 1) fail("blocksize", "blocksize >= 1");
  if (!(window_len > 0.0) || !std::isfinite(window_len)) fail("window_len", "window_len > 0");
  if (!(window_overlap >= 0.0 && window_overlap < 1.0)) fail("window_overlap", "0 <= overlap < 1");
  if (!(max_dims_fraction > 0.0 && max_dims_fraction <= 1.0))
    fail("max_dims_fraction", "0 < max_dims_fraction <= 1");
}

std::size_t FilterCoefficients::order() const {
  return std::max(a.size(), b.size()) - 1;
}

bool FilterCoefficients::is_identity() const {
  return b.size() == 1 && a.size() == 1 && b[0] == a[0];
}

void FilterCoefficients::normalize() {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::InvalidInput, "filter coefficient lists must not be empty");
  const double a0 = a.front();
  if (a0 == 0.0 || !std::isfinite(a0))
    throw Error(ErrorCode::InvalidInput, "filter coefficient a[0] must be finite and non-zero");
  for (double v : b)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "non-finite filter coefficient");
  for (double v : a)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "non-finite filter coefficient");
  if (a0 != 1.0) {
    for (double& v : b) v /= a0;
    for (double& v : a) v /= a0;
  }
}

Eigen::Index CalibrationState::window_samples() const {
  return static_cast<Eigen::Index>(std::lround(params.window_len * srate));
}

int rejection_budget(double max_dims_fraction, Eigen::Index channels) {
  return static_cast<int>(std::floor(max_dims_fraction * static_cast<double>(channels) + 1e-9));
}

void check_window_rule(double window_len, double srate, Eigen::Index channels) {
  const double samples = std::round(window_len * srate);
  if (samples < 1.5 * static_cast<double>(channels)) {
    throw Error(ErrorCode::WindowTooShort,
                "window of " + std::to_string(static_cast<long long>(samples)) +
                    " samples is smaller than 1.5x the number of channels (" +
                    std::to_string(static_cast<long long>(channels)) + ")");
  }
}

} // namespace asr
