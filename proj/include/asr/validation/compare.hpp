#pragma once

#include "asr/core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace asr::validation {

inline constexpr double kRelErrorFloor = 1e-30;

struct ComparisonReport {
  double max_rel_error{0.0};
  double max_abs_error{0.0};
  std::optional<std::int64_t> first_divergent_sample; // first column above tolerance
  double tolerance{0.0};
  bool pass{true};

  std::string to_text() const;
  std::string to_key_values() const; // one key=value per line
};

// Per-value relative error |a - b| / max(|a|, |b|, 1e-30). Different shapes
// are ShapeMismatch.
ComparisonReport compare(const Matrix& a, const Matrix& b, double rel_tol);

struct AttenuationMetrics {
  std::optional<double> artifact_reduction; // 1 - RMS(cleaned[mask]) / RMS(raw[mask])
  std::optional<double> clean_change;       // |1 - RMS(cleaned[~mask]) / RMS(raw[~mask])|
};

// `cleaned` must already be aligned with `raw` (see align_output).
AttenuationMetrics attenuation_metrics(const Matrix& cleaned, const Matrix& raw,
                                       const std::vector<bool>& mask);

// Drops the first `lookahead` output samples so column t lines up with input
// column t; the result has N - lookahead columns.
Matrix align_output(const Matrix& output, Eigen::Index lookahead);

} // namespace asr::validation
