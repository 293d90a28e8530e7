#include "asr/runtime/pipeline.hpp"

#include "asr/core/calibrate.hpp"
#include "asr/core/error.hpp"
#include "asr/io/config_parser.hpp"
#include "asr/io/csv.hpp"
#include "asr/io/state_file.hpp"
#include "asr/io/text.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <filesystem>

namespace asr::runtime {

namespace {

constexpr auto kIdlePark = std::chrono::microseconds(200);

} // namespace

CalibrationState load_or_calibrate(const PipelineConfig& config) {
  const std::filesystem::path path = config.calibration_file_name;
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::PrepareFailed, e.what());
  }

  try {
    if (io::looks_like_state_file(text)) {
      CalibrationState state = io::parse_calibration_state(text);
      if (std::abs(state.srate - config.sampling_rate) > 1e-9 * config.sampling_rate)
        throw Error(ErrorCode::PrepareFailed, "calibration state was made at " +
                                                  io::format_double(state.srate) +
                                                  " Hz, config says " +
                                                  io::format_double(config.sampling_rate) + " Hz");
      if (state.params.window_len != config.window_length)
        throw Error(ErrorCode::PrepareFailed,
                    "calibration state window length differs from WindowLength");
      check_window_rule(config.window_length, config.sampling_rate, state.channels());
      return state;
    }
    io::CalibrationCsv csv = io::parse_calibration_csv(text);
    check_window_rule(config.window_length, config.sampling_rate, csv.data.rows());
    // Explicit configuration wins over the file's preamble.
    const FilterCoefficients filter =
        config.filter ? *config.filter : csv.filter.value_or(FilterCoefficients{});
    return asr_calibrate(csv.data, config.sampling_rate, config.effective_calibration_params(),
                         filter);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::WindowTooShort || e.code() == ErrorCode::PrepareFailed) throw;
    throw Error(ErrorCode::PrepareFailed,
                "calibration from '" + path.string() + "' failed: " + e.what());
  }
}

Pipeline::~Pipeline() {
  if (prepared_) {
    try {
      release();
    } catch (...) {
    }
  }
}

void Pipeline::prepare(const PipelineConfig& config, SideChannelRegistry& registry) {
  if (prepared_) throw Error(ErrorCode::InvalidLifecycle, "pipeline is already prepared");
  io::validate_config(config);

  auto calib = std::make_shared<const CalibrationState>(load_or_calibrate(config));
  const Eigen::Index channels = calib->channels();

  SideChannelVariable* input = registry.find(config.var_name);
  if (!input)
    throw Error(ErrorCode::PrepareFailed, "input variable '" + config.var_name + "' is not registered");
  if (input->stride != channels)
    throw Error(ErrorCode::PrepareFailed, "input variable '" + config.var_name + "' has stride " +
                                              std::to_string(input->stride) + ", calibration has " +
                                              std::to_string(channels) + " channels");
  if (input->locked)
    throw Error(ErrorCode::PrepareFailed, "input variable '" + config.var_name + "' is locked");

  const auto chunk_cap = static_cast<Eigen::Index>(config.chunk_capacity);
  const std::string out_name = config.resolved_output_name();
  if (const SideChannelVariable* existing = registry.find(out_name); existing && existing->locked)
    throw Error(ErrorCode::PrepareFailed, "output variable '" + out_name + "' is locked");

  auto processor = std::make_unique<ProcessorState>(*calib, config.processing);
  inbound_ = std::make_unique<ChunkFifo>(channels, chunk_cap, config.fifo_capacity);
  outbound_ = std::make_unique<ChunkFifo>(channels, chunk_cap, config.fifo_capacity);
  work_ = Matrix::Zero(channels, chunk_cap);
  backup_ = Matrix::Zero(channels, chunk_cap);

  SideChannelVariable& output = registry.register_variable(
      out_name, channels, chunk_cap * static_cast<Eigen::Index>(config.fifo_capacity));
  input->locked = true;
  output.locked = true;

  config_ = config;
  registry_ = &registry;
  input_ = input;
  output_ = &output;
  calib_ = std::move(calib);
  processor_ = std::move(processor);
  lookahead_ = processor_->lookahead();
  next_sample_index_ = 0;
  for (auto* c : {&chunks_in_, &chunks_out_, &chunks_dropped_, &chunk_errors_, &samples_in_,
                  &samples_out_})
    c->store(0);
  stop_.store(false);
  worker_ = std::thread([this] { worker_loop(); });
  prepared_ = true;
  spdlog::info("asr pipeline prepared: {} channels, window {} samples, lookahead {} samples",
               channels, calib_->window_samples(), lookahead_);
}

Eigen::Index Pipeline::process() {
  if (!prepared_) throw Error(ErrorCode::InvalidLifecycle, "process() called before prepare()");

  const Eigen::Index n = input_->samples;
  const Eigen::Index cap = inbound_->chunk_capacity();
  for (Eigen::Index off = 0; off < n; off += cap) {
    const Eigen::Index len = std::min(cap, n - off);
    const ChunkFifo::PushResult r =
        inbound_->push_drop_oldest(input_->payload.middleCols(off, len), next_sample_index_);
    next_sample_index_ += len;
    chunks_in_.fetch_add(1);
    samples_in_.fetch_add(len);
    if (r.dropped > 0) chunks_dropped_.fetch_add(r.dropped);
  }

  output_->samples = 0;
  const Eigen::Index out_cap = output_->capacity();
  while (output_->samples + cap <= out_cap) {
    const auto got =
        outbound_->try_pop(output_->payload.middleCols(output_->samples, cap), nullptr);
    if (!got) break;
    output_->samples += *got;
    chunks_out_.fetch_add(1);
    samples_out_.fetch_add(*got);
  }
  output_->sample_counter += output_->samples;
  return output_->samples;
}

void Pipeline::worker_loop() {
  const CalibrationState& calib = *calib_;
  while (!stop_.load()) {
    if (worker_paused_.load()) {
      std::this_thread::sleep_for(kIdlePark);
      continue;
    }
    std::int64_t first = 0;
    const auto got = inbound_->try_pop(work_, &first);
    if (!got) {
      std::this_thread::sleep_for(kIdlePark);
      continue;
    }
    auto block = work_.leftCols(*got);
    backup_.leftCols(*got) = block;
    try {
      asr_process_inplace(block, calib, *processor_);
    } catch (const Error& e) {
      block = backup_.leftCols(*got);
      chunk_errors_.fetch_add(1);
      spdlog::warn("asr worker: chunk at sample {} forwarded uncleaned: {}", first, e.what());
    }
    while (!outbound_->try_push(block, first)) {
      if (stop_.load()) return;
      std::this_thread::sleep_for(kIdlePark);
    }
  }
}

void Pipeline::release() {
  if (!prepared_) throw Error(ErrorCode::InvalidLifecycle, "release() called while not prepared");
  const auto t0 = std::chrono::steady_clock::now();
  stop_.store(true);
  if (worker_.joinable()) worker_.join();
  last_join_ =
      std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0);

  input_->locked = false;
  output_->locked = false;
  inbound_.reset();
  outbound_.reset();
  processor_.reset();
  work_.resize(0, 0);
  backup_.resize(0, 0);
  calib_.reset();
  input_ = nullptr;
  output_ = nullptr;
  registry_ = nullptr;
  prepared_ = false;
}

PipelineCounters Pipeline::counters() const {
  PipelineCounters c;
  c.chunks_in = chunks_in_.load();
  c.chunks_out = chunks_out_.load();
  c.chunks_dropped = chunks_dropped_.load();
  c.chunk_errors = chunk_errors_.load();
  c.samples_in = samples_in_.load();
  c.samples_out = samples_out_.load();
  return c;
}

const CalibrationState& Pipeline::calibration() const {
  if (!calib_) throw Error(ErrorCode::InvalidLifecycle, "pipeline is not prepared");
  return *calib_;
}

} // namespace asr::runtime
