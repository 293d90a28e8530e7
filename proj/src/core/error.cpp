#include "asr/core/error.hpp"

namespace asr {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::FilterDiverged: return "FilterDiverged";
    case ErrorCode::CalibrationDegenerate: return "CalibrationDegenerate";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::RaggedCsv: return "RaggedCsv";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::PrepareFailed: return "PrepareFailed";
    case ErrorCode::InvalidLifecycle: return "InvalidLifecycle";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> row,
                     std::optional<std::size_t> col) {
  std::string out = to_string(code);
  if (row) {
    out += " (row " + std::to_string(*row);
    if (col) out += ", col " + std::to_string(*col);
    out += ")";
  }
  out += ": " + message;
  return out;
}

} // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row,
             std::optional<std::size_t> col)
    : std::runtime_error(decorate(code, message, row, col)), code_(code), row_(row), col_(col) {}

} // namespace asr
