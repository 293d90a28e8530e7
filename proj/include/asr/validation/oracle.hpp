#pragma once

#include "asr/core/processor.hpp"
#include "asr/core/types.hpp"

#include <vector>

namespace asr::validation {

// Whole-recording reference implementation of calibration and processing.
// It shares constants with the streaming code but none of its routines:
// direct-form I filtering, plain-loop covariances, classic Weiszfeld
// updates, cyclic Jacobi eigendecomposition and a normal-equation route to
// the reconstruction matrix instead of an SVD pseudoinverse.

struct JacobiEigen {
  Vector values;  // ascending
  Matrix vectors; // orthonormal columns
};

JacobiEigen jacobi_eigen(const Matrix& symmetric);

// Direct-form I, zero initial conditions.
Matrix oracle_filter(const Matrix& data, const FilterCoefficients& coeffs);

CalibrationState oracle_calibrate(const Matrix& clean, double srate,
                                  const CalibrationParams& params,
                                  const FilterCoefficients& filter = {});

// Reconstruction matrix for one window covariance.
Matrix oracle_reconstruction(const Matrix& cov, const CalibrationState& calib,
                             int* n_rejected = nullptr);

// Cleans a whole recording with a given calibration. Output column t holds
// the cleaned version of input column t - L (zeros for t < L).
Matrix oracle_process(const Matrix& recording, const CalibrationState& calib,
                      const ProcessParams& params = {});

// Calibrates on `calibration_data` with the oracle, then processes.
Matrix oracle_process(const Matrix& recording, const Matrix& calibration_data, double srate,
                      const CalibrationParams& calibration_params,
                      const ProcessParams& process_params = {},
                      const FilterCoefficients& filter = {});

} // namespace asr::validation
