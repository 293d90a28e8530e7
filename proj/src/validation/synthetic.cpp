#include "asr/validation/synthetic.hpp"

#include "asr/core/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace asr::validation {

namespace {

Eigen::Index samples_for(double seconds, double srate) {
  return static_cast<Eigen::Index>(std::lround(seconds * srate));
}

// Unit-variance AR(1) sequence started from its stationary distribution.
void fill_ar1(Eigen::Ref<Vector> out, double phi, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - phi * phi);
  double s = normal(rng);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (i > 0) s = phi * s + innovation * normal(rng);
    out(i) = s;
  }
}

} // namespace

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
  if (channels < 1) fail("channels must be >= 1");
  if (!(srate > 0.0)) fail("srate must be > 0");
  if (!(duration_s > 0.0)) fail("duration must be > 0");
  if (!(calibration_duration_s > 0.0)) fail("calibration duration must be > 0");
  if (!(ar_coefficient >= 0.0 && ar_coefficient < 1.0)) fail("ar_coefficient must be in [0, 1)");
  const Eigen::Index total = samples_for(duration_s, srate);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const ArtifactEvent& e = events[i];
    const std::string tag = "event " + std::to_string(i) + ": ";
    if (!(e.amplitude > 0.0)) fail(tag + "amplitude multiplier must be > 0");
    if (!(e.onset_s >= 0.0) || !(e.duration_s > 0.0)) fail(tag + "onset must be >= 0 and duration > 0");
    if (samples_for(e.onset_s, srate) + samples_for(e.duration_s, srate) > total)
      fail(tag + "extends past the end of the recording");
    if (!e.direction.empty()) {
      if (static_cast<int>(e.direction.size()) != channels) fail(tag + "direction has wrong length");
      double norm = 0.0;
      for (double v : e.direction) norm += v * v;
      if (!(norm > 0.0) || !std::isfinite(norm)) fail(tag + "direction must be non-zero");
    }
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const Eigen::Index c = spec.channels;
  const Eigen::Index n_cal = samples_for(spec.calibration_duration_s, spec.srate);
  const Eigen::Index n_rec = samples_for(spec.duration_s, spec.srate);

  std::mt19937_64 mixing_rng(spec.mixing_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SyntheticData out;
  out.mixing = Matrix::Identity(c, c);
  for (Eigen::Index i = 0; i < c; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      out.mixing(i, j) += 0.5 * normal(mixing_rng) / std::sqrt(static_cast<double>(c));

  std::mt19937_64 rng(spec.seed);
  Matrix sources(c, n_cal + n_rec);
  for (Eigen::Index ch = 0; ch < c; ++ch) {
    Vector row(n_cal + n_rec);
    fill_ar1(row, spec.ar_coefficient, rng);
    sources.row(ch) = row.transpose();
  }
  const Matrix mixed = out.mixing * sources;
  out.calibration = mixed.leftCols(n_cal);
  out.recording = mixed.rightCols(n_rec);
  out.mask.assign(static_cast<std::size_t>(n_rec), false);

  const Matrix clean_cov = out.mixing * out.mixing.transpose();
  for (const ArtifactEvent& e : spec.events) {
    Vector dir(c);
    if (e.direction.empty()) {
      for (Eigen::Index i = 0; i < c; ++i) dir(i) = normal(rng);
    } else {
      for (Eigen::Index i = 0; i < c; ++i) dir(i) = e.direction[static_cast<std::size_t>(i)];
    }
    dir.normalize();
    const double clean_rms = std::sqrt(dir.dot(clean_cov * dir));
    const Eigen::Index start = samples_for(e.onset_s, spec.srate);
    const Eigen::Index len = samples_for(e.duration_s, spec.srate);
    Vector burst(len);
    fill_ar1(burst, spec.ar_coefficient, rng);
    for (Eigen::Index k = 0; k < len; ++k) {
      out.recording.col(start + k) += (e.amplitude * clean_rms * burst(k)) * dir;
      out.mask[static_cast<std::size_t>(start + k)] = true;
    }
  }
  return out;
}

} // namespace asr::validation
