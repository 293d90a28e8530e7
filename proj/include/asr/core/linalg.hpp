#pragma once

#include "asr/core/types.hpp"

namespace asr {

struct SymmetricEigen {
  Vector values;  // ascending
  Matrix vectors; // column i pairs with values(i)
};

// Relative asymmetry ||A - A^T||_F / ||A||_F (0 for the zero matrix).
double asymmetry(const Matrix& a);

// Eigendecomposition of a symmetric matrix. Eigenvalues ascending; each
// eigenvector is signed so that its largest-magnitude entry is positive (the
// first such entry on ties). Throws InvalidInput for non-finite entries and
// NotSymmetric when asymmetry exceeds 1e-10.
SymmetricEigen symmetric_eig(const Matrix& a);

// Flips each column so its largest-magnitude entry is positive.
void canonicalize_signs(Matrix& vectors);

// Symmetric PSD square root V * diag(sqrt(lambda)) * V^T. Eigenvalues below
// 1e-12 * trace / C are clamped to that floor. A zero (or negative) trace is
// CalibrationDegenerate; asymmetry above 1e-10 is NotSymmetric.
Matrix matrix_sqrt_psd(const Matrix& a);

// Moore-Penrose inverse. Singular values below rel_tol * s_max * max(rows, cols)
// are treated as zero.
Matrix pinv(const Matrix& a, double rel_tol = 1e-12);

bool all_finite(const Eigen::Ref<const Matrix>& a);

} // namespace asr
