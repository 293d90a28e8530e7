#pragma once

#include "asr/core/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace asr::io {

// A recording with its sampling rate:
//   #asr-signal channels=<C> srate=<Hz>
// followed by C CSV rows (one per channel). Parsing also accepts several
// consecutive blocks of C rows, as written by SignalStreamWriter, and joins
// them along the sample axis.
struct SignalRecord {
  Matrix data;
  double srate{0.0};
};

SignalRecord parse_signal_record(std::string_view text);
std::string format_signal_record(const SignalRecord& rec);
SignalRecord load_signal_record(const std::filesystem::path& path);
void save_signal_record(const std::filesystem::path& path, const SignalRecord& rec);

struct SignalHeader {
  Eigen::Index channels{0};
  double srate{0.0};
};

std::string format_signal_header(const SignalHeader& h);
SignalHeader parse_signal_header(std::string_view line);

// Streaming framing: a header line, then any number of chunk blocks, each
// made of C CSV rows of equal length.
class SignalStreamReader {
public:
  explicit SignalStreamReader(std::istream& in);

  const SignalHeader& header() const { return header_; }
  // Next chunk, or nullopt at a clean end of stream. A block cut short is a
  // ParseError.
  std::optional<Matrix> next();

private:
  std::istream& in_;
  SignalHeader header_;
  std::size_t line_{1};
};

class SignalStreamWriter {
public:
  SignalStreamWriter(std::ostream& out, const SignalHeader& header);
  void write(const Eigen::Ref<const Matrix>& chunk);

private:
  std::ostream& out_;
};

} // namespace asr::io
