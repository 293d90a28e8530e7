#include "asr/validation/compare.hpp"

#include "asr/core/error.hpp"
#include "asr/io/text.hpp"

#include <algorithm>
#include <cmath>

namespace asr::validation {

ComparisonReport compare(const Matrix& a, const Matrix& b, double rel_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  ComparisonReport r;
  r.tolerance = rel_tol;
  for (Eigen::Index s = 0; s < a.cols(); ++s) {
    for (Eigen::Index ch = 0; ch < a.rows(); ++ch) {
      const double x = a(ch, s);
      const double y = b(ch, s);
      const double abs_err = std::abs(x - y);
      const double denom = std::max({std::abs(x), std::abs(y), kRelErrorFloor});
      // NaN on either side counts as an infinite error.
      const double rel = std::isnan(abs_err) ? INFINITY : abs_err / denom;
      r.max_abs_error = std::max(r.max_abs_error, std::isnan(abs_err) ? INFINITY : abs_err);
      r.max_rel_error = std::max(r.max_rel_error, rel);
      if (rel > rel_tol && !r.first_divergent_sample) r.first_divergent_sample = s;
    }
  }
  r.pass = r.max_rel_error <= rel_tol;
  return r;
}

std::string ComparisonReport::to_text() const {
  std::string s = pass ? "PASS" : "FAIL";
  s += ": max relative error " + io::format_double(max_rel_error) + " (tolerance " +
       io::format_double(tolerance) + "), max absolute error " + io::format_double(max_abs_error);
  if (first_divergent_sample)
    s += ", first divergent sample " + std::to_string(*first_divergent_sample);
  return s;
}

std::string ComparisonReport::to_key_values() const {
  std::string s;
  s += "pass=" + std::string(pass ? "true" : "false") + "\n";
  s += "max_rel_error=" + io::format_double(max_rel_error) + "\n";
  s += "max_abs_error=" + io::format_double(max_abs_error) + "\n";
  s += "tolerance=" + io::format_double(tolerance) + "\n";
  s += "first_divergent_sample=" +
       (first_divergent_sample ? std::to_string(*first_divergent_sample) : std::string("none")) +
       "\n";
  return s;
}

AttenuationMetrics attenuation_metrics(const Matrix& cleaned, const Matrix& raw,
                                       const std::vector<bool>& mask) {
  if (cleaned.rows() != raw.rows() || cleaned.cols() != raw.cols() ||
      static_cast<Eigen::Index>(mask.size()) != raw.cols())
    throw Error(ErrorCode::ShapeMismatch, "attenuation_metrics needs aligned inputs of equal size");

  double clean_in = 0.0, clean_out = 0.0, art_in = 0.0, art_out = 0.0;
  std::size_t art_n = 0, clean_n = 0;
  for (Eigen::Index s = 0; s < raw.cols(); ++s) {
    const double e_raw = raw.col(s).squaredNorm();
    const double e_out = cleaned.col(s).squaredNorm();
    if (mask[static_cast<std::size_t>(s)]) {
      art_in += e_raw;
      art_out += e_out;
      ++art_n;
    } else {
      clean_in += e_raw;
      clean_out += e_out;
      ++clean_n;
    }
  }
  // Equal sample counts on both sides, so RMS ratios reduce to energy ratios.
  AttenuationMetrics m;
  if (art_n > 0 && art_in > 0.0) m.artifact_reduction = 1.0 - std::sqrt(art_out / art_in);
  if (clean_n > 0 && clean_in > 0.0) m.clean_change = std::abs(1.0 - std::sqrt(clean_out / clean_in));
  return m;
}

Matrix align_output(const Matrix& output, Eigen::Index lookahead) {
  if (lookahead < 0 || lookahead > output.cols())
    throw Error(ErrorCode::ShapeMismatch, "lookahead exceeds output length");
  return output.rightCols(output.cols() - lookahead);
}

} // namespace asr::validation
