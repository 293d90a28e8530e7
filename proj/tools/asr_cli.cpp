#include "asr/core/calibrate.hpp"
#include "asr/core/error.hpp"
#include "asr/io/csv.hpp"
#include "asr/io/signal_record.hpp"
#include "asr/io/state_file.hpp"
#include "asr/io/text.hpp"
#include "asr/runtime/pipeline.hpp"
#include "asr/validation/compare.hpp"
#include "asr/validation/drivers.hpp"
#include "asr/validation/synthetic.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

using namespace asr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::FilterDiverged:
  case ErrorCode::InvalidLifecycle:
    return kExitRuntime;
  default:
    return kExitValidation;
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("asr");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ASR_LOG")) {
    const std::string v = env;
    if (v == "error") spdlog::set_level(spdlog::level::err);
    else if (v == "warn") spdlog::set_level(spdlog::level::warn);
    else if (v == "info") spdlog::set_level(spdlog::level::info);
    else if (v == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ASR_LOG='{}' not recognized; expected error, warn, info or debug", v);
  }
}

// Machine-readable key=value lines.
class Report {
public:
  template <class T>
  void add(const std::string& key, const T& value) {
    if constexpr (std::is_floating_point_v<T>) {
      lines_.emplace_back(key, io::format_double(static_cast<double>(value)));
    } else if constexpr (std::is_same_v<T, bool>) {
      lines_.emplace_back(key, value ? "true" : "false");
    } else if constexpr (std::is_arithmetic_v<T>) {
      lines_.emplace_back(key, std::to_string(value));
    } else {
      lines_.emplace_back(key, std::string(value));
    }
  }
  void print(std::ostream& out) const {
    for (const auto& [k, v] : lines_) out << k << '=' << v << '\n';
  }

private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

void add_counters(Report& r, const runtime::PipelineCounters& c) {
  r.add("chunks_in", c.chunks_in);
  r.add("chunks_out", c.chunks_out);
  r.add("chunks_dropped", c.chunks_dropped);
  r.add("chunk_errors", c.chunk_errors);
  r.add("samples_in", c.samples_in);
  r.add("samples_out", c.samples_out);
}

std::optional<FilterCoefficients> filter_from_flags(const std::vector<double>& b,
                                                    const std::vector<double>& a) {
  if (b.empty() && a.empty()) return std::nullopt;
  FilterCoefficients f;
  if (!b.empty()) f.b = b;
  if (!a.empty()) f.a = a;
  f.normalize();
  return f;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
  std::string input;
  std::string output;
  double srate{0.0};
  double window_length{0.5};
  CalibrationParams params;
  std::vector<double> filter_b;
  std::vector<double> filter_a;
  bool report{false};
};

int run_calibrate(const CalibrateOptions& o) {
  const io::CalibrationCsv csv = io::load_calibration_csv_full(o.input);
  const Eigen::Index channels = csv.data.rows();
  CalibrationParams params = o.params;
  params.window_len = o.window_length;
  FilterCoefficients filter;
  if (auto flags = filter_from_flags(o.filter_b, o.filter_a)) filter = *flags;
  else if (csv.filter) filter = *csv.filter;

  const CalibrationState state = asr_calibrate(csv.data, o.srate, params, filter);
  io::save_calibration_state(o.output, state);

  std::vector<double> thresholds(static_cast<std::size_t>(channels));
  for (Eigen::Index j = 0; j < channels; ++j)
    thresholds[static_cast<std::size_t>(j)] = state.threshold.row(j).norm();
  std::sort(thresholds.begin(), thresholds.end());
  const double min_required = 1.5 * static_cast<double>(channels);

  if (o.report) {
    Report r;
    r.add("channels", channels);
    r.add("samples", csv.data.cols());
    r.add("window_samples", state.window_samples());
    r.add("window_min_samples", min_required);
    r.add("threshold_min", thresholds.front());
    r.add("threshold_median", thresholds[thresholds.size() / 2]);
    r.add("threshold_max", thresholds.back());
    r.add("output", o.output);
    r.print(std::cout);
  } else {
    std::cout << "calibrated " << channels << " channels from " << csv.data.cols() << " samples\n"
              << "window: " << state.window_samples() << " samples (>= 1.5 x " << channels
              << " channels = " << io::format_double(min_required) << ")\n"
              << "component thresholds: min " << io::format_double(thresholds.front())
              << ", median " << io::format_double(thresholds[thresholds.size() / 2]) << ", max "
              << io::format_double(thresholds.back()) << "\n"
              << "state written to " << o.output << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------ process

struct ProcessOptions {
  std::string calibration;
  std::string input;
  std::string output;
  std::optional<double> srate;
  std::optional<double> window_length;
  CalibrationParams params;
  std::vector<double> filter_b;
  std::vector<double> filter_a;
  int stepsize{32};
  int lookahead{-1};
  Eigen::Index chunk{32};
  bool stream{false};
  std::string var_name{"eeg"};
  std::size_t chunk_capacity{256};
  std::size_t fifo_capacity{8};
  double max_wait_s{1.0};
  bool pause_worker{false};
  double drain_timeout_s{5.0};
  bool report{false};
};

runtime::PipelineConfig pipeline_config(const ProcessOptions& o, double srate) {
  runtime::PipelineConfig cfg;
  cfg.sampling_rate = srate;
  cfg.var_name = o.var_name;
  cfg.calibration_file_name = o.calibration;
  cfg.chunk_capacity = o.chunk_capacity;
  cfg.fifo_capacity = o.fifo_capacity;
  cfg.calibration = o.params;
  cfg.processing.stepsize = o.stepsize;
  cfg.processing.lookahead = o.lookahead;
  cfg.filter = filter_from_flags(o.filter_b, o.filter_a);
  // A saved state carries its own window length; use it unless overridden.
  cfg.window_length = 0.5;
  const std::string text = io::read_file(o.calibration);
  if (io::looks_like_state_file(text))
    cfg.window_length = io::parse_calibration_state(text).params.window_len;
  if (o.window_length) cfg.window_length = *o.window_length;
  return cfg;
}

int run_process_file(const ProcessOptions& o) {
  const io::SignalRecord rec = io::load_signal_record(o.input);
  if (o.srate && *o.srate != rec.srate)
    throw Error(ErrorCode::InvalidValue, "--sampling-rate differs from the input record's rate");
  const runtime::PipelineConfig cfg = pipeline_config(o, rec.srate);
  const CalibrationState calib = runtime::load_or_calibrate(cfg);
  if (calib.channels() != rec.data.rows())
    throw Error(ErrorCode::ChannelMismatch,
                "calibration has " + std::to_string(calib.channels()) + " channels, input has " +
                    std::to_string(rec.data.rows()));
  if (o.chunk < 1) throw Error(ErrorCode::InvalidValue, "--chunk must be >= 1");

  const Matrix out = validation::process_in_chunks(rec.data, calib, cfg.processing, o.chunk);
  io::save_signal_record(o.output, {out, rec.srate});

  const ProcessorState probe(calib, cfg.processing);
  Report r;
  r.add("channels", rec.data.rows());
  r.add("samples", rec.data.cols());
  r.add("lookahead", probe.lookahead());
  r.add("chunk", o.chunk);
  r.add("output", o.output);
  if (o.report) r.print(std::cout);
  else
    std::cout << "processed " << rec.data.rows() << " x " << rec.data.cols() << " samples (lookahead "
              << probe.lookahead() << ") -> " << o.output << "\n";
  return kExitOk;
}

int run_process_stream(const ProcessOptions& o) {
  if (o.chunk < 1) throw Error(ErrorCode::InvalidValue, "--chunk must be >= 1");
  std::ios::sync_with_stdio(false);
  io::SignalStreamReader reader(std::cin);
  const io::SignalHeader header = reader.header();
  if (o.srate && *o.srate != header.srate)
    throw Error(ErrorCode::InvalidValue, "--sampling-rate differs from the stream header");

  const runtime::PipelineConfig cfg = pipeline_config(o, header.srate);
  runtime::SideChannelRegistry registry;
  registry.register_variable(cfg.var_name, header.channels, o.chunk);
  runtime::Pipeline pipeline;
  pipeline.prepare(cfg, registry);
  if (o.pause_worker) pipeline.set_worker_paused(true);
  const std::string out_name = cfg.resolved_output_name();

  io::SignalStreamWriter writer(std::cout, header);
  const auto emit = [&] {
    const auto& out = registry.at(out_name);
    if (out.samples == 0) return;
    writer.write(out.view());
    if (!std::cout) throw Error(ErrorCode::IoError, "writing to standard output failed");
  };

  const Matrix empty(header.channels, 0);
  const auto fifo_slots = static_cast<std::int64_t>(cfg.fifo_capacity);
  const auto slot_samples = static_cast<Eigen::Index>(cfg.chunk_capacity);
  // Input from a pipe has no deadline, so the caller may wait a bounded time
  // for FIFO room instead of dropping; with --max-wait 0 it never waits.
  const auto wait_for_room = [&](Eigen::Index len) {
    const std::int64_t needed = (len + slot_samples - 1) / slot_samples;
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(o.max_wait_s);
    while (pipeline.counters().in_flight() + needed > fifo_slots &&
           std::chrono::steady_clock::now() < deadline) {
      registry.write(cfg.var_name, empty);
      pipeline.process();
      emit();
      std::this_thread::sleep_for(std::chrono::microseconds(100));
    }
  };

  int code = kExitOk;
  std::string failure;
  try {
    while (auto block = reader.next()) {
      for (Eigen::Index off = 0; off < block->cols(); off += o.chunk) {
        const Eigen::Index len = std::min(o.chunk, block->cols() - off);
        if (o.max_wait_s > 0.0) wait_for_room(len);
        registry.write(cfg.var_name, block->middleCols(off, len));
        pipeline.process();
        emit();
      }
    }
    // End of input: collect what the worker still holds.
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(o.drain_timeout_s);
    while (pipeline.counters().in_flight() > 0 && std::chrono::steady_clock::now() < deadline) {
      registry.write(cfg.var_name, empty);
      pipeline.process();
      emit();
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::IoError, "writing to standard output failed");
  } catch (const Error& e) {
    failure = e.what();
    code = kExitRuntime;
  }

  const runtime::PipelineCounters counters = pipeline.counters();
  const Eigen::Index lookahead = pipeline.lookahead();
  pipeline.release();

  Report r;
  add_counters(r, counters);
  r.add("lookahead", lookahead);
  r.add("join_us", static_cast<std::int64_t>(pipeline.last_join_time().count()));
  if (o.report) {
    r.print(std::cerr);
  } else {
    std::cerr << "stream: " << counters.chunks_in << " chunks in, " << counters.chunks_out
              << " out, " << counters.chunks_dropped << " dropped, " << counters.chunk_errors
              << " errors\n";
  }
  if (code != kExitOk) std::cerr << "error: " << failure << "\n";
  return code;
}

// ----------------------------------------------------------------- simulate

struct SimulateOptions {
  validation::SyntheticSpec spec;
  std::vector<std::string> bursts;
  std::string output;
  std::string calibration_output;
  std::string mask_output;
  bool report{false};
};

validation::ArtifactEvent parse_burst(const std::string& text) {
  // onset:duration[:amplitude]
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    const std::string piece = text.substr(start, colon == std::string::npos ? colon : colon - start);
    double v = 0.0;
    if (!io::parse_double(io::trim(piece), v))
      throw Error(ErrorCode::InvalidValue, "--burst '" + text + "': expected onset:duration[:amplitude]");
    parts.push_back(v);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3)
    throw Error(ErrorCode::InvalidValue, "--burst '" + text + "': expected onset:duration[:amplitude]");
  validation::ArtifactEvent ev;
  ev.onset_s = parts[0];
  ev.duration_s = parts[1];
  if (parts.size() == 3) ev.amplitude = parts[2];
  return ev;
}

int run_simulate(SimulateOptions o) {
  for (const auto& b : o.bursts) o.spec.events.push_back(parse_burst(b));
  const validation::SyntheticData d = validation::generate_synthetic(o.spec);
  io::save_signal_record(o.output, {d.recording, o.spec.srate});
  if (!o.calibration_output.empty()) io::save_calibration_csv(o.calibration_output, d.calibration);
  if (!o.mask_output.empty()) {
    Matrix m(1, static_cast<Eigen::Index>(d.mask.size()));
    for (std::size_t i = 0; i < d.mask.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = d.mask[i] ? 1.0 : 0.0;
    io::write_file_atomic(o.mask_output, io::format_csv_matrix(m));
  }
  const auto masked = std::count(d.mask.begin(), d.mask.end(), true);
  Report r;
  r.add("channels", d.recording.rows());
  r.add("samples", d.recording.cols());
  r.add("calibration_samples", d.calibration.cols());
  r.add("artifact_samples", static_cast<std::int64_t>(masked));
  r.add("output", o.output);
  if (o.report) r.print(std::cout);
  else
    std::cout << "simulated " << d.recording.rows() << " x " << d.recording.cols() << " samples ("
              << masked << " artifact samples) -> " << o.output << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ compare

struct CompareOptions {
  std::string a;
  std::string b;
  double tolerance{1e-5};
  bool report{false};
};

int run_compare(const CompareOptions& o) {
  const io::SignalRecord a = io::load_signal_record(o.a);
  const io::SignalRecord b = io::load_signal_record(o.b);
  const validation::ComparisonReport rep = validation::compare(a.data, b.data, o.tolerance);
  std::cout << (o.report ? rep.to_key_values() : rep.to_text() + "\n");
  return rep.pass ? kExitOk : kExitValidation;
}

// -------------------------------------------------------------------- bench

struct BenchOptions {
  int channels{24};
  double srate{500.0};
  double duration_s{60.0};
  Eigen::Index chunk{32};
  double cutoff{5.0};
  std::uint64_t seed{7};
  double min_rtf{0.0};
  bool report{false};
};

int run_bench(const BenchOptions& o) {
  validation::SyntheticSpec spec;
  spec.channels = o.channels;
  spec.srate = o.srate;
  spec.duration_s = o.duration_s;
  spec.calibration_duration_s = 60.0;
  spec.seed = o.seed;
  spec.events.push_back({o.duration_s * 0.3, std::min(2.0, o.duration_s * 0.05), {}, 10.0});
  const validation::SyntheticData d = validation::generate_synthetic(spec);
  CalibrationParams params;
  params.cutoff = o.cutoff;
  const CalibrationState calib = asr_calibrate(d.calibration, o.srate, params);

  // The worker thread runs exactly this path; FIFO hand-off cost is a copy per chunk.
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix out = validation::process_in_chunks(d.recording, calib, {}, o.chunk);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.cols() != d.recording.cols()) throw Error(ErrorCode::ShapeMismatch, "bench output has the wrong length");

  const double samples = static_cast<double>(d.recording.cols());
  const double rate = samples / seconds;
  const double rtf = rate / o.srate;
  Report r;
  r.add("channels", o.channels);
  r.add("srate", o.srate);
  r.add("samples", d.recording.cols());
  r.add("seconds", seconds);
  r.add("samples_per_second", rate);
  r.add("realtime_factor", rtf);
  if (o.report) r.print(std::cout);
  else
    std::cout << o.channels << " channels @ " << io::format_double(o.srate) << " Hz: "
              << static_cast<long long>(rate) << " samples/s, real-time factor "
              << io::format_double(std::round(rtf * 10.0) / 10.0) << "x\n";
  if (o.min_rtf > 0.0 && rtf < o.min_rtf) {
    std::cerr << "real-time factor " << rtf << " below required " << o.min_rtf << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

template <class T>
void add_srate(CLI::App* cmd, T& target, bool required) {
  auto* opt = cmd->add_option("--sampling-rate,--srate", target, "Sampling rate in Hz");
  if (required) opt->required();
}

void add_calibration_params(CLI::App* cmd, CalibrationParams& p) {
  cmd->add_option("--cutoff", p.cutoff, "Rejection cutoff k in standard deviations")->capture_default_str();
  cmd->add_option("--blocksize", p.blocksize, "Samples per covariance block")->capture_default_str();
  cmd->add_option("--window-overlap", p.window_overlap, "Statistics window overlap")->capture_default_str();
  cmd->add_option("--max-dims-fraction", p.max_dims_fraction,
                  "Largest fraction of components that may be rejected")
      ->capture_default_str();
}

void add_filter(CLI::App* cmd, std::vector<double>& b, std::vector<double>& a) {
  cmd->add_option("--filter-b", b, "Shaping filter numerator, comma separated")->delimiter(',');
  cmd->add_option("--filter-a", a, "Shaping filter denominator, comma separated")->delimiter(',');
}

} // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Artifact subspace reconstruction for multichannel EEG"};
  app.require_subcommand(1);

  CalibrateOptions cal;
  auto* calibrate = app.add_subcommand("calibrate", "Learn a calibration state from clean data");
  calibrate->add_option("-i,--input,--calibration-file", cal.input, "Clean calibration CSV (channels x samples)")
      ->required();
  calibrate->add_option("-o,--output", cal.output, "Calibration state file to write")->required();
  add_srate(calibrate, cal.srate, true);
  calibrate->add_option("--window-length", cal.window_length, "Statistics window in seconds")
      ->capture_default_str();
  add_calibration_params(calibrate, cal.params);
  add_filter(calibrate, cal.filter_b, cal.filter_a);
  calibrate->add_flag("--report", cal.report, "Print key=value lines");

  ProcessOptions proc;
  auto* process = app.add_subcommand("process", "Clean a recording or a stream");
  process->add_option("-c,--calibration,--calibration-file", proc.calibration,
                      "Calibration state file or clean calibration CSV")
      ->required();
  process->add_option("-i,--input", proc.input, "Input signal record (file mode)");
  process->add_option("-o,--output", proc.output, "Output signal record (file mode)");
  process->add_flag("--stream", proc.stream, "Read chunks from stdin, write cleaned chunks to stdout");
  process->add_option("--sampling-rate,--srate", proc.srate, "Expected sampling rate in Hz");
  process->add_option("--window-length", proc.window_length,
                      "Statistics window in seconds (default: from the state file, else 0.5)");
  add_calibration_params(process, proc.params);
  add_filter(process, proc.filter_b, proc.filter_a);
  process->add_option("--stepsize", proc.stepsize, "Samples between reconstruction updates")
      ->capture_default_str();
  process->add_option("--lookahead", proc.lookahead, "Processing delay in samples (-1: half a window)")
      ->capture_default_str();
  process->add_option("--chunk", proc.chunk, "Samples per processing call")->capture_default_str();
  process->add_option("--var-name", proc.var_name, "Stream variable label")->capture_default_str();
  process->add_option("--chunk-capacity", proc.chunk_capacity, "Samples per FIFO slot (stream mode)")
      ->capture_default_str();
  process->add_option("--fifo-capacity", proc.fifo_capacity, "FIFO slots (stream mode)")->capture_default_str();
  process->add_option("--max-wait", proc.max_wait_s,
                      "Seconds a process() call may wait for FIFO room (stream mode; 0: never)")
      ->capture_default_str();
  process->add_option("--drain-timeout", proc.drain_timeout_s, "Seconds to wait for the worker at end of input")
      ->capture_default_str();
  process->add_flag("--pause-worker", proc.pause_worker, "Testing aid: keep the worker stalled")
      ->group("");
  process->add_flag("--report", proc.report, "Print key=value lines");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a seeded synthetic recording");
  simulate->add_option("--channels", sim.spec.channels)->capture_default_str();
  add_srate(simulate, sim.spec.srate, false);
  simulate->add_option("--duration", sim.spec.duration_s, "Recording length in seconds")->capture_default_str();
  simulate->add_option("--calibration-duration", sim.spec.calibration_duration_s)->capture_default_str();
  simulate->add_option("--seed", sim.spec.seed)->capture_default_str();
  simulate->add_option("--mixing-seed", sim.spec.mixing_seed)->capture_default_str();
  simulate->add_option("--ar-coefficient", sim.spec.ar_coefficient)->capture_default_str();
  simulate->add_option("--burst", sim.bursts, "Artifact burst onset:duration[:amplitude], repeatable");
  simulate->add_option("-o,--output", sim.output, "Signal record to write")->required();
  simulate->add_option("--calibration-output", sim.calibration_output, "Clean calibration CSV to write");
  simulate->add_option("--mask-output", sim.mask_output, "Artifact mask CSV to write");
  simulate->add_flag("--report", sim.report, "Print key=value lines");

  CompareOptions cmp;
  auto* compare = app.add_subcommand("compare", "Compare two signal records");
  compare->add_option("a", cmp.a, "First record")->required();
  compare->add_option("b", cmp.b, "Second record")->required();
  compare->add_option("--tolerance", cmp.tolerance, "Per-sample relative tolerance")->capture_default_str();
  compare->add_flag("--report", cmp.report, "Print key=value lines");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Measure processing throughput");
  bench_cmd->add_option("--channels", bench.channels)->capture_default_str();
  add_srate(bench_cmd, bench.srate, false);
  bench_cmd->add_option("--duration", bench.duration_s, "Seconds of signal to process")->capture_default_str();
  bench_cmd->add_option("--chunk", bench.chunk, "Samples per processing call")->capture_default_str();
  bench_cmd->add_option("--cutoff", bench.cutoff)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--min-rtf", bench.min_rtf, "Exit 1 when the real-time factor is lower");
  bench_cmd->add_flag("--report", bench.report, "Print key=value lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*calibrate) return run_calibrate(cal);
    if (*process) {
      if (proc.stream) return run_process_stream(proc);
      if (proc.input.empty() || proc.output.empty()) {
        std::cerr << "error: file mode needs --input and --output (or use --stream)\n";
        return kExitValidation;
      }
      return run_process_file(proc);
    }
    if (*simulate) return run_simulate(sim);
    if (*compare) return run_compare(cmp);
    if (*bench_cmd) return run_bench(bench);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
