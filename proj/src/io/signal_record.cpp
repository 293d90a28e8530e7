#include "asr/io/signal_record.hpp"

#include "asr/core/error.hpp"
#include "asr/io/csv.hpp"
#include "asr/io/text.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <vector>

namespace asr::io {

namespace {

constexpr std::string_view kMagic = "#asr-signal";

} // namespace

std::string format_signal_header(const SignalHeader& h) {
  return std::string(kMagic) + " channels=" + std::to_string(h.channels) +
         " srate=" + format_double(h.srate);
}

SignalHeader parse_signal_header(std::string_view line) {
  line = trim(line);
  if (line.substr(0, kMagic.size()) != kMagic)
    throw Error(ErrorCode::ParseError, "missing '#asr-signal' header", 1);
  SignalHeader h;
  bool have_channels = false;
  bool have_srate = false;
  std::string_view rest = line.substr(kMagic.size());
  while (!(rest = trim(rest)).empty()) {
    const std::size_t sp = rest.find(' ');
    const std::string_view tok = rest.substr(0, sp);
    rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp);
    const std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ParseError, "malformed header token '" + std::string(tok) + "'", 1);
    const std::string_view key = tok.substr(0, eq);
    double v = 0.0;
    if (!parse_double(tok.substr(eq + 1), v))
      throw Error(ErrorCode::ParseError, "bad header value in '" + std::string(tok) + "'", 1);
    if (key == "channels") {
      if (v < 1 || v != std::floor(v))
        throw Error(ErrorCode::ParseError, "channels must be a positive integer", 1);
      h.channels = static_cast<Eigen::Index>(v);
      have_channels = true;
    } else if (key == "srate") {
      if (!(v > 0.0)) throw Error(ErrorCode::ParseError, "srate must be > 0", 1);
      h.srate = v;
      have_srate = true;
    } else {
      throw Error(ErrorCode::ParseError, "unknown header key '" + std::string(key) + "'", 1);
    }
  }
  if (!have_channels || !have_srate)
    throw Error(ErrorCode::ParseError, "header needs channels= and srate=", 1);
  return h;
}

SignalRecord parse_signal_record(std::string_view text) {
  if (trim(text).empty()) throw Error(ErrorCode::EmptyFile, "empty signal record");
  const std::size_t nl = text.find('\n');
  const SignalHeader h = parse_signal_header(text.substr(0, nl));
  if (nl == std::string_view::npos)
    throw Error(ErrorCode::ParseError, "signal record has no samples", 2);

  // The body is one or more blocks of C rows; a saved record has one block,
  // captured stream output has one per chunk.
  std::vector<std::string_view> rows;
  std::vector<std::size_t> row_line;
  std::size_t line_no = 1;
  for (std::string_view line : split_lines(text.substr(nl + 1))) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(line);
    row_line.push_back(line_no);
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "signal record has no samples", 2);
  const auto c = static_cast<std::size_t>(h.channels);
  if (rows.size() % c != 0)
    throw Error(ErrorCode::ParseError,
                "header declares " + std::to_string(h.channels) + " channels, body has " +
                    std::to_string(rows.size()) + " rows");

  std::vector<Matrix> blocks;
  Eigen::Index total = 0;
  for (std::size_t start = 0; start < rows.size(); start += c) {
    std::string block;
    for (std::size_t r = start; r < start + c; ++r) {
      block += rows[r];
      block += '\n';
    }
    blocks.push_back(parse_csv_matrix(block, row_line[start]));
    total += blocks.back().cols();
  }
  SignalRecord rec;
  rec.srate = h.srate;
  rec.data.resize(h.channels, total);
  Eigen::Index col = 0;
  for (const Matrix& b : blocks) {
    rec.data.middleCols(col, b.cols()) = b;
    col += b.cols();
  }
  return rec;
}

std::string format_signal_record(const SignalRecord& rec) {
  return format_signal_header({rec.data.rows(), rec.srate}) + "\n" + format_csv_matrix(rec.data);
}

SignalRecord load_signal_record(const std::filesystem::path& path) {
  return parse_signal_record(read_file(path));
}

void save_signal_record(const std::filesystem::path& path, const SignalRecord& rec) {
  write_file_atomic(path, format_signal_record(rec));
}

SignalStreamReader::SignalStreamReader(std::istream& in) : in_(in) {
  std::string line;
  if (!std::getline(in_, line)) throw Error(ErrorCode::EmptyFile, "empty signal stream");
  header_ = parse_signal_header(line);
}

std::optional<Matrix> SignalStreamReader::next() {
  std::string block;
  std::string line;
  Eigen::Index rows = 0;
  while (rows < header_.channels) {
    if (!std::getline(in_, line)) {
      if (rows == 0) return std::nullopt;
      throw Error(ErrorCode::ParseError, "stream ended inside a chunk", line_ + 1);
    }
    ++line_;
    if (rows == 0 && trim(line).empty()) continue;
    block += line;
    block += '\n';
    ++rows;
  }
  return parse_csv_matrix(block);
}

SignalStreamWriter::SignalStreamWriter(std::ostream& out, const SignalHeader& header) : out_(out) {
  out_ << format_signal_header(header) << '\n';
  out_.flush();
}

void SignalStreamWriter::write(const Eigen::Ref<const Matrix>& chunk) {
  if (chunk.cols() == 0) return;
  out_ << format_csv_matrix(chunk);
  out_.flush();
  if (!out_) throw Error(ErrorCode::IoError, "write to output stream failed");
}

} // namespace asr::io
