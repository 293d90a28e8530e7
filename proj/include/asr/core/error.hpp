#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace asr {

enum class ErrorCode {
  // numerical core
  InvalidInput,
  EmptyInput,
  InsufficientData,
  NotSymmetric,
  FilterDiverged,
  CalibrationDegenerate,
  WindowTooShort,
  ChannelMismatch,
  // serialization
  IoError,
  EmptyFile,
  RaggedCsv,
  ParseError,
  UnsupportedVersion,
  MissingKey,
  InvalidValue,
  // runtime
  PrepareFailed,
  InvalidLifecycle,
  // validation
  InvalidSpec,
  ShapeMismatch,
};

const char* to_string(ErrorCode code);

// Every failure in the library is reported through this type. Parsers fill
// in the 1-based row/column of the offending cell when there is one.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::size_t> col = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> col() const noexcept { return col_; }

private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> col_;
};

} // namespace asr
