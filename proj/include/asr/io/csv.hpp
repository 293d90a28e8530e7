#pragma once

#include "asr/core/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asr::io {

// Rows are channels, columns are samples. Cells are '.'-decimal reals with
// optional exponent; both \n and \r\n line endings are accepted.
// Errors: EmptyFile, RaggedCsv(row), ParseError(row, col). Rows and columns
// in errors are 1-based and count data rows only.
Matrix parse_csv_matrix(std::string_view text, std::size_t first_row = 1);
std::string format_csv_matrix(const Matrix& m);

// Clean calibration recording. An optional preamble of '#' lines may carry
// the shaping filter:
//   # filter_b=1,-0.95
//   # filter_a=1
// Other comment lines are ignored.
struct CalibrationCsv {
  Matrix data;
  std::optional<FilterCoefficients> filter;
};

CalibrationCsv parse_calibration_csv(std::string_view text);
CalibrationCsv load_calibration_csv_full(const std::filesystem::path& path);
Matrix load_calibration_csv(const std::filesystem::path& path);
void save_calibration_csv(const std::filesystem::path& path, const Matrix& data,
                          const std::optional<FilterCoefficients>& filter = std::nullopt);

std::vector<double> parse_number_list(std::string_view text, std::string_view what);

} // namespace asr::io
