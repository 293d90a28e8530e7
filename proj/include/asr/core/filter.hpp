#pragma once

#include "asr/core/types.hpp"

namespace asr {

// Per-channel delay-line memory for a transposed direct-form II IIR filter.
// Column c holds the max(len(a), len(b)) - 1 state values of channel c.
struct IirFilterState {
  Matrix z;

  IirFilterState() = default;
  IirFilterState(const FilterCoefficients& coeffs, Eigen::Index channels);
};

// Filters `data` (channels x samples) in place, carrying `state` across calls.
// Throws FilterDiverged if any output value is not finite.
void iir_filter_inplace(Eigen::Ref<Matrix> data, const FilterCoefficients& coeffs,
                        IirFilterState& state);

// Functional form: returns the filtered copy and updates `state`.
Matrix iir_filter(const Matrix& data, const FilterCoefficients& coeffs, IirFilterState& state);

// Single column (one multichannel sample). No finiteness check; callers that
// need one test the result themselves.
void iir_filter_sample(Eigen::Ref<Vector> sample, const FilterCoefficients& coeffs,
                       IirFilterState& state);

} // namespace asr
