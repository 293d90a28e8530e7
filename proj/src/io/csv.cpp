#include "asr/io/csv.hpp"

#include "asr/core/error.hpp"
#include "asr/io/text.hpp"

namespace asr::io {

namespace {

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Drops trailing blank lines.
void drop_trailing_blank(std::vector<std::string_view>& lines) {
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
}

Matrix parse_rows(const std::vector<std::string_view>& lines, std::size_t first_row) {
  if (lines.empty()) throw Error(ErrorCode::EmptyFile, "no data rows");
  const std::size_t cols = split_cells(lines.front()).size();
  Matrix m(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto cells = split_cells(lines[r]);
    const std::size_t row_no = first_row + r;
    if (cells.size() != cols)
      throw Error(ErrorCode::RaggedCsv,
                  "row has " + std::to_string(cells.size()) + " values, expected " +
                      std::to_string(cols),
                  row_no);
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v))
        throw Error(ErrorCode::ParseError,
                    "not a finite number: '" + std::string(trim(cells[c])) + "'", row_no, c + 1);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

} // namespace

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (std::string_view cell : split_cells(text)) {
    double v = 0.0;
    if (!parse_double(cell, v))
      throw Error(ErrorCode::ParseError,
                  std::string(what) + ": not a finite number: '" + std::string(trim(cell)) + "'");
    out.push_back(v);
  }
  return out;
}

Matrix parse_csv_matrix(std::string_view text, std::size_t first_row) {
  auto lines = split_lines(text);
  drop_trailing_blank(lines);
  return parse_rows(lines, first_row);
}

std::string format_csv_matrix(const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

CalibrationCsv parse_calibration_csv(std::string_view text) {
  auto lines = split_lines(text);
  drop_trailing_blank(lines);

  CalibrationCsv out;
  std::optional<std::vector<double>> b;
  std::optional<std::vector<double>> a;
  std::size_t first = 0;
  for (; first < lines.size(); ++first) {
    std::string_view line = trim(lines[first]);
    if (line.empty() || line.front() != '#') break;
    line = trim(line.substr(1));
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = line.substr(eq + 1);
    if (key == "filter_b") b = parse_number_list(value, "filter_b");
    else if (key == "filter_a") a = parse_number_list(value, "filter_a");
  }
  if (b || a) {
    FilterCoefficients f;
    if (b) f.b = *b;
    if (a) f.a = *a;
    f.normalize();
    out.filter = f;
  }

  std::vector<std::string_view> data(lines.begin() + static_cast<std::ptrdiff_t>(first), lines.end());
  out.data = parse_rows(data, 1);
  if (out.data.cols() < 2)
    throw Error(ErrorCode::ParseError, "calibration CSV needs at least 2 samples per channel");
  return out;
}

CalibrationCsv load_calibration_csv_full(const std::filesystem::path& path) {
  return parse_calibration_csv(read_file(path));
}

Matrix load_calibration_csv(const std::filesystem::path& path) {
  return load_calibration_csv_full(path).data;
}

void save_calibration_csv(const std::filesystem::path& path, const Matrix& data,
                          const std::optional<FilterCoefficients>& filter) {
  std::string text;
  if (filter) {
    auto join = [](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ',';
        s += format_double(v[i]);
      }
      return s;
    };
    text += "# filter_b=" + join(filter->b) + "\n";
    text += "# filter_a=" + join(filter->a) + "\n";
  }
  text += format_csv_matrix(data);
  write_file_atomic(path, text);
}

} // namespace asr::io
