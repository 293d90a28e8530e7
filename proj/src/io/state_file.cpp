#include "asr/io/state_file.hpp"

#include "asr/core/error.hpp"
#include "asr/io/csv.hpp"
#include "asr/io/text.hpp"

#include <cmath>

namespace asr::io {

namespace {

constexpr std::string_view kMagic = "asr-calibration-state";

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

class LineCursor {
public:
  explicit LineCursor(std::string_view text) : lines_(split_lines(text)) {}

  std::string_view next(std::string_view expect_what) {
    while (pos_ < lines_.size() && trim(lines_[pos_]).empty()) ++pos_;
    if (pos_ >= lines_.size())
      throw Error(ErrorCode::ParseError,
                  "unexpected end of state file (expected " + std::string(expect_what) + ")",
                  pos_ + 1);
    return trim(lines_[pos_++]);
  }

  std::size_t line() const { return pos_; }

  // "key value" line; returns value.
  std::string_view keyed(std::string_view key) {
    const std::string_view l = next(key);
    if (l.substr(0, key.size()) != key || l.size() <= key.size() || l[key.size()] != ' ')
      throw Error(ErrorCode::ParseError, "expected '" + std::string(key) + "'", pos_);
    return trim(l.substr(key.size() + 1));
  }

  double number(std::string_view key) {
    double v = 0.0;
    if (!parse_double(keyed(key), v))
      throw Error(ErrorCode::ParseError, "bad value for '" + std::string(key) + "'", pos_);
    return v;
  }

  Matrix matrix(std::string_view key, Eigen::Index n) {
    if (next(key) != key) throw Error(ErrorCode::ParseError, "expected '" + std::string(key) + "'", pos_);
    std::string block;
    for (Eigen::Index r = 0; r < n; ++r) {
      block += next(key);
      block += '\n';
    }
    const std::size_t first = pos_ - static_cast<std::size_t>(n) + 1;
    Matrix m;
    try {
      m = parse_csv_matrix(block, first);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, std::string(key) + ": " + e.what(), e.row(), e.col());
    }
    if (m.rows() != n || m.cols() != n)
      throw Error(ErrorCode::ParseError, std::string(key) + " is not " + std::to_string(n) + "x" +
                                             std::to_string(n), pos_);
    return m;
  }

private:
  std::vector<std::string_view> lines_;
  std::size_t pos_{0};
};

} // namespace

bool looks_like_state_file(std::string_view text) {
  return trim(text).substr(0, kMagic.size()) == kMagic;
}

std::string format_calibration_state(const CalibrationState& s) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kStateFileVersion) + "\n";
  out += "channels " + std::to_string(s.channels()) + "\n";
  out += "srate " + format_double(s.srate) + "\n";
  out += "cutoff " + format_double(s.params.cutoff) + "\n";
  out += "blocksize " + std::to_string(s.params.blocksize) + "\n";
  out += "window_len " + format_double(s.params.window_len) + "\n";
  out += "window_overlap " + format_double(s.params.window_overlap) + "\n";
  out += "max_dims_fraction " + format_double(s.params.max_dims_fraction) + "\n";
  out += "filter_b " + join(s.filter.b) + "\n";
  out += "filter_a " + join(s.filter.a) + "\n";
  out += "mixing\n" + format_csv_matrix(s.mixing);
  out += "threshold\n" + format_csv_matrix(s.threshold);
  out += "end\n";
  return out;
}

CalibrationState parse_calibration_state(std::string_view text) {
  if (trim(text).empty()) throw Error(ErrorCode::EmptyFile, "empty state file");
  LineCursor cur(text);

  const std::string_view version_text = cur.keyed(kMagic);
  double version = 0.0;
  if (!parse_double(version_text, version) || version != std::floor(version))
    throw Error(ErrorCode::ParseError, "bad version tag '" + std::string(version_text) + "'", 1);
  if (static_cast<int>(version) != kStateFileVersion)
    throw Error(ErrorCode::UnsupportedVersion,
                "state file version " + std::string(version_text) + " (supported: " +
                    std::to_string(kStateFileVersion) + ")");

  CalibrationState s;
  const double channels = cur.number("channels");
  if (channels < 1 || channels != std::floor(channels))
    throw Error(ErrorCode::ParseError, "channels must be a positive integer", cur.line());
  const auto n = static_cast<Eigen::Index>(channels);
  s.srate = cur.number("srate");
  s.params.cutoff = cur.number("cutoff");
  const double blocksize = cur.number("blocksize");
  if (blocksize != std::floor(blocksize))
    throw Error(ErrorCode::ParseError, "blocksize must be an integer", cur.line());
  s.params.blocksize = static_cast<int>(blocksize);
  s.params.window_len = cur.number("window_len");
  s.params.window_overlap = cur.number("window_overlap");
  s.params.max_dims_fraction = cur.number("max_dims_fraction");
  s.filter.b = parse_number_list(cur.keyed("filter_b"), "filter_b");
  s.filter.a = parse_number_list(cur.keyed("filter_a"), "filter_a");
  s.mixing = cur.matrix("mixing", n);
  s.threshold = cur.matrix("threshold", n);
  if (cur.next("end") != "end") throw Error(ErrorCode::ParseError, "expected 'end'", cur.line());

  try {
    s.params.validate();
    s.filter.normalize();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!(s.srate > 0.0)) throw Error(ErrorCode::ParseError, "srate must be > 0");
  return s;
}

void save_calibration_state(const std::filesystem::path& path, const CalibrationState& s) {
  write_file_atomic(path, format_calibration_state(s));
}

CalibrationState load_calibration_state(const std::filesystem::path& path) {
  return parse_calibration_state(read_file(path));
}

} // namespace asr::io
