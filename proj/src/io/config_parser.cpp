#include "asr/io/config_parser.hpp"

#include "asr/core/error.hpp"
#include "asr/io/csv.hpp"
#include "asr/io/text.hpp"

#include <cmath>
#include <map>

namespace asr::io {

namespace {

[[noreturn]] void invalid(std::string_view name, std::string_view reason) {
  throw Error(ErrorCode::InvalidValue, std::string(name) + ": " + std::string(reason));
}

double as_number(std::string_view name, std::string_view value) {
  double v = 0.0;
  if (!parse_double(value, v)) invalid(name, "not a finite number: '" + std::string(value) + "'");
  return v;
}

long long as_integer(std::string_view name, std::string_view value) {
  const double v = as_number(name, value);
  if (v != std::floor(v) || std::abs(v) > 1e15) invalid(name, "must be an integer");
  return static_cast<long long>(v);
}

} // namespace

void validate_config(const runtime::PipelineConfig& cfg) {
  if (!(cfg.sampling_rate > 0.0)) invalid("SamplingRate", "must be > 0");
  if (!(cfg.window_length > 0.0)) invalid("WindowLength", "must be > 0");
  if (cfg.var_name.empty()) invalid("VarName", "must not be empty");
  if (cfg.calibration_file_name.empty()) invalid("CalibrationFileName", "must not be empty");
  if (cfg.resolved_output_name() == cfg.var_name)
    invalid("OutputVarName", "must differ from VarName");
  if (cfg.fifo_capacity < 2) invalid("FifoCapacity", "must be >= 2");
  if (cfg.chunk_capacity < 1) invalid("ChunkCapacity", "must be >= 1");
  const CalibrationParams& p = cfg.calibration;
  if (!(p.cutoff > 0.0)) invalid("Cutoff", "must be > 0");
  if (p.blocksize < 1) invalid("BlockSize", "must be >= 1");
  if (!(p.window_overlap >= 0.0 && p.window_overlap < 1.0)) invalid("WindowOverlap", "must be in [0, 1)");
  if (!(p.max_dims_fraction > 0.0 && p.max_dims_fraction <= 1.0))
    invalid("MaxDimsFraction", "must be in (0, 1]");
  if (cfg.processing.stepsize < 1) invalid("StepSize", "must be >= 1");
  if (cfg.processing.lookahead < -1) invalid("Lookahead", "must be >= 0 (or -1 for default)");
  if (std::lround(cfg.window_length * cfg.sampling_rate) < 2)
    invalid("WindowLength", "window must span at least 2 samples");
}

runtime::PipelineConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ParseError, "expected Key=Value, got '" + std::string(line) + "'", i + 1);
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorCode::ParseError, "empty key", i + 1);
    if (!kv.emplace(key, value).second)
      throw Error(ErrorCode::ParseError, "duplicate key '" + key + "'", i + 1);
  }

  static const char* const kKnown[] = {
      "SamplingRate", "WindowLength", "VarName",       "CalibrationFileName", "OutputVarName",
      "ChunkCapacity", "FifoCapacity", "Cutoff",       "BlockSize",           "WindowOverlap",
      "MaxDimsFraction", "StepSize",   "Lookahead",    "FilterB",             "FilterA"};
  for (const auto& [key, value] : kv) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw Error(ErrorCode::ParseError, "unknown key '" + key + "'");
  }

  const auto required = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::MissingKey, key);
    return it->second;
  };
  const auto optional = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  runtime::PipelineConfig cfg;
  cfg.sampling_rate = as_number("SamplingRate", required("SamplingRate"));
  cfg.window_length = as_number("WindowLength", required("WindowLength"));
  cfg.var_name = required("VarName");
  cfg.calibration_file_name = required("CalibrationFileName");

  if (const auto* v = optional("OutputVarName")) cfg.output_var_name = *v;
  if (const auto* v = optional("ChunkCapacity")) {
    const long long n = as_integer("ChunkCapacity", *v);
    if (n < 1) invalid("ChunkCapacity", "must be >= 1");
    cfg.chunk_capacity = static_cast<std::size_t>(n);
  }
  if (const auto* v = optional("FifoCapacity")) {
    const long long n = as_integer("FifoCapacity", *v);
    if (n < 2) invalid("FifoCapacity", "must be >= 2");
    cfg.fifo_capacity = static_cast<std::size_t>(n);
  }
  if (const auto* v = optional("Cutoff")) cfg.calibration.cutoff = as_number("Cutoff", *v);
  if (const auto* v = optional("BlockSize"))
    cfg.calibration.blocksize = static_cast<int>(as_integer("BlockSize", *v));
  if (const auto* v = optional("WindowOverlap"))
    cfg.calibration.window_overlap = as_number("WindowOverlap", *v);
  if (const auto* v = optional("MaxDimsFraction"))
    cfg.calibration.max_dims_fraction = as_number("MaxDimsFraction", *v);
  if (const auto* v = optional("StepSize"))
    cfg.processing.stepsize = static_cast<int>(as_integer("StepSize", *v));
  if (const auto* v = optional("Lookahead"))
    cfg.processing.lookahead = static_cast<int>(as_integer("Lookahead", *v));

  const auto* fb = optional("FilterB");
  const auto* fa = optional("FilterA");
  if (fb || fa) {
    FilterCoefficients f;
    try {
      if (fb) f.b = parse_number_list(*fb, "FilterB");
      if (fa) f.a = parse_number_list(*fa, "FilterA");
      f.normalize();
    } catch (const Error& e) {
      invalid(fb && !fa ? "FilterB" : "FilterA", e.what());
    }
    cfg.filter = f;
  }

  cfg.calibration.window_len = cfg.window_length;
  validate_config(cfg);
  return cfg;
}

runtime::PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

} // namespace asr::io
