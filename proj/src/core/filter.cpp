#include "asr/core/filter.hpp"

#include "asr/core/error.hpp"
#include "asr/core/linalg.hpp"

namespace asr {

IirFilterState::IirFilterState(const FilterCoefficients& coeffs, Eigen::Index channels)
    : z(Matrix::Zero(static_cast<Eigen::Index>(coeffs.order()), channels)) {}

namespace {

inline double coeff(const std::vector<double>& c, std::size_t i) {
  return i < c.size() ? c[i] : 0.0;
}

} // namespace

void iir_filter_sample(Eigen::Ref<Vector> sample, const FilterCoefficients& coeffs,
                       IirFilterState& state) {
  const std::size_t order = coeffs.order();
  const double b0 = coeffs.b[0];
  if (order == 0) {
    if (b0 != 1.0) sample *= b0;
    return;
  }
  for (Eigen::Index ch = 0; ch < sample.size(); ++ch) {
    auto z = state.z.col(ch);
    const double x = sample(ch);
    const double y = b0 * x + z(0);
    for (std::size_t i = 0; i + 1 < order; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      z(k) = coeff(coeffs.b, i + 1) * x + z(k + 1) - coeff(coeffs.a, i + 1) * y;
    }
    z(static_cast<Eigen::Index>(order - 1)) =
        coeff(coeffs.b, order) * x - coeff(coeffs.a, order) * y;
    sample(ch) = y;
  }
}

void iir_filter_inplace(Eigen::Ref<Matrix> data, const FilterCoefficients& coeffs,
                        IirFilterState& state) {
  if (coeffs.a.empty() || coeffs.b.empty() || coeffs.a[0] == 0.0)
    throw Error(ErrorCode::InvalidInput, "filter requires a[0] != 0");
  if (state.z.rows() != static_cast<Eigen::Index>(coeffs.order()) ||
      state.z.cols() != data.rows())
    throw Error(ErrorCode::InvalidInput, "filter state is not dimensioned for this input");

  FilterCoefficients local;
  const FilterCoefficients* c = &coeffs;
  if (coeffs.a[0] != 1.0) {
    local = coeffs;
    local.normalize();
    c = &local;
  }
  for (Eigen::Index s = 0; s < data.cols(); ++s) {
    iir_filter_sample(data.col(s), *c, state);
  }
  if (!all_finite(data))
    throw Error(ErrorCode::FilterDiverged, "non-finite filter output; coefficients are unstable");
}

Matrix iir_filter(const Matrix& data, const FilterCoefficients& coeffs, IirFilterState& state) {
  Matrix out = data;
  iir_filter_inplace(out, coeffs, state);
  return out;
}

} // namespace asr
