#pragma once

#include "asr/core/types.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace asr::test {

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Matrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
  const Matrix g = gaussian(n, n, seed);
  return 0.5 * (g + g.transpose());
}

inline double rel_fro(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / b.norm();
}

// Per-test scratch directory, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("asr_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace asr::test
