#include "asr/core/linalg.hpp"

#include "asr/core/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace asr {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kClampRelative = 1e-12;

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::InvalidInput, std::string(what) + " requires a non-empty square matrix");
  if (!all_finite(a)) throw Error(ErrorCode::InvalidInput, std::string(what) + ": non-finite entry");
}

void require_symmetric(const Matrix& a, const char* what) {
  const double asym = asymmetry(a);
  if (asym > kSymmetryTol)
    throw Error(ErrorCode::NotSymmetric,
                std::string(what) + ": relative asymmetry " + std::to_string(asym));
}

} // namespace

bool all_finite(const Eigen::Ref<const Matrix>& a) {
  return a.allFinite();
}

double asymmetry(const Matrix& a) {
  const double norm = a.norm();
  if (norm == 0.0) return 0.0;
  return (a - a.transpose()).norm() / norm;
}

void canonicalize_signs(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double mag = std::abs(vectors(i, j));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (vectors(best, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

SymmetricEigen symmetric_eig(const Matrix& a) {
  require_square_finite(a, "symmetric_eig");
  require_symmetric(a, "symmetric_eig");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidInput, "symmetric_eig: eigensolver did not converge");
  SymmetricEigen out{solver.eigenvalues(), solver.eigenvectors()};
  canonicalize_signs(out.vectors);
  return out;
}

Matrix matrix_sqrt_psd(const Matrix& a) {
  require_square_finite(a, "matrix_sqrt_psd");
  require_symmetric(a, "matrix_sqrt_psd");
  const double trace = a.trace();
  if (!(trace > 0.0))
    throw Error(ErrorCode::CalibrationDegenerate, "covariance has zero trace");
  const double floor = kClampRelative * trace / static_cast<double>(a.rows());

  SymmetricEigen eig = symmetric_eig(a);
  int clamped = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) < floor) {
      eig.values(i) = floor;
      ++clamped;
    }
  }
  if (clamped > 0)
    spdlog::warn("matrix_sqrt_psd: clamped {} eigenvalue(s) to {:.3g}; input is rank deficient",
                 clamped, floor);

  const Vector roots = eig.values.array().sqrt();
  Matrix s = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (s + s.transpose());
}

Matrix pinv(const Matrix& a, double rel_tol) {
  if (!all_finite(a)) throw Error(ErrorCode::InvalidInput, "pinv: non-finite entry");
  if (a.size() == 0) return Matrix(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff =
      rel_tol * (sv.size() > 0 ? sv(0) : 0.0) * static_cast<double>(std::max(a.rows(), a.cols()));
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 0.0 && sv(i) >= cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

} // namespace asr
