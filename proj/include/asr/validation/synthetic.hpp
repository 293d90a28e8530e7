#pragma once

#include "asr/core/types.hpp"

#include <cstdint>
#include <vector>

namespace asr::validation {

struct ArtifactEvent {
  double onset_s{0.0};
  double duration_s{0.0};
  std::vector<double> direction; // channel-space direction; empty picks a seeded random one
  double amplitude{10.0};        // multiple of the clean RMS along `direction`
};

struct SyntheticSpec {
  int channels{8};
  double srate{250.0};
  double duration_s{60.0};
  double calibration_duration_s{60.0};
  std::uint64_t mixing_seed{1};
  std::uint64_t seed{42};
  double ar_coefficient{0.8}; // per-channel source coloring
  std::vector<ArtifactEvent> events;

  // Throws InvalidSpec.
  void validate() const;
};

struct SyntheticData {
  Matrix calibration;     // clean segment
  Matrix recording;       // test recording with artifacts
  std::vector<bool> mask; // true on samples touched by an artifact
  Matrix mixing;          // source mixing used for both segments
};

// Base signal: fixed mixing of independent AR(1)-colored Gaussian sources
// (unit variance). Artifacts are AR(1) bursts projected along the event
// direction, scaled to `amplitude` times the clean RMS in that direction.
// Fully determined by the spec and its seeds.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

} // namespace asr::validation
