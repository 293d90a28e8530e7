// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "asr/core/calibrate.hpp"
#include "asr/core/error.hpp"
#include "asr/core/filter.hpp"
#include "asr/core/linalg.hpp"
#include "asr/core/processor.hpp"
#include "asr/core/robust.hpp"
#include "asr/io/csv.hpp"
#include "asr/io/signal_record.hpp"
#include "asr/io/state_file.hpp"
#include "asr/io/text.hpp"
#include "asr/runtime/pipeline.hpp"
#include "asr/validation/compare.hpp"
#include "asr/validation/drivers.hpp"
#include "asr/validation/oracle.hpp"
#include "asr/validation/synthetic.hpp"
#include "reference_kernels.hpp"
#include "rt_hooks.hpp"
#include "test_support.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace asr;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and thresholds.
constexpr double kOracleRelTol = 1e-5;
constexpr double kOracleSecondsPerSpec = 10.0;
constexpr double kIdentityUpdateFraction = 0.99;
constexpr double kIdentityPathAbsTol = 1e-9;
constexpr double kIdentityCutoff = 20.0;
constexpr double kMinArtifactReduction = 0.5;
constexpr double kMaxCleanChange = 0.05;
constexpr double kChunkInvarianceRelTol = 1e-10;
constexpr auto kMaxJoin = std::chrono::milliseconds(100);
constexpr double kMinRealtimeFactor = 10.0;
constexpr double kGeometricMedianTol = 1e-8;
constexpr double kSqrtRelTol = 1e-10;
constexpr double kEigResidualRel = 1e-9;
constexpr double kFilterChunkTol = 1e-12;
constexpr double kPenroseTol = 1e-8;

constexpr double kSrate = 250.0;
constexpr int kChannels = 8;
constexpr double kDuration = 60.0;

struct Outcome {
  bool pass{false};
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

validation::SyntheticSpec base_spec(std::uint64_t seed) {
  validation::SyntheticSpec s;
  s.channels = kChannels;
  s.srate = kSrate;
  s.duration_s = kDuration;
  s.calibration_duration_s = 60.0;
  s.seed = seed;
  s.mixing_seed = seed + 1000;
  return s;
}

// The pre-registered 10x burst scenario.
validation::SyntheticSpec burst_spec() {
  validation::SyntheticSpec s = base_spec(42);
  s.mixing_seed = 1;
  s.events.push_back({20.0, 1.0, {}, 10.0});
  s.events.push_back({40.0, 2.0, {}, 10.0});
  return s;
}

runtime::PipelineConfig runtime_config(const std::filesystem::path& calib_csv) {
  runtime::PipelineConfig cfg;
  cfg.sampling_rate = kSrate;
  cfg.window_length = 0.5;
  cfg.var_name = "eeg";
  cfg.calibration_file_name = calib_csv.string();
  cfg.chunk_capacity = 64;
  cfg.fifo_capacity = 8;
  return cfg;
}

// 1. Streaming runtime vs offline oracle.
Outcome oracle_equivalence(const test::TempDir& dir) {
  std::vector<validation::SyntheticSpec> specs;
  specs.push_back(base_spec(101));
  specs.push_back(base_spec(102));
  for (std::uint64_t seed : {103, 104, 105}) {
    validation::SyntheticSpec s = base_spec(seed);
    s.events.push_back({10.0 + static_cast<double>(seed % 7), 1.0, {}, 10.0});
    s.events.push_back({35.0, 2.5, {}, 6.0 + static_cast<double>(seed % 5)});
    specs.push_back(s);
  }
  double worst = 0.0;
  double slowest = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto t0 = Clock::now();
    const auto d = validation::generate_synthetic(specs[i]);
    const auto csv = dir / ("ac1_" + std::to_string(i) + ".csv");
    io::save_calibration_csv(csv, d.calibration);
    const auto cfg = runtime_config(csv);
    const auto run = validation::process_with_runtime(d.recording, cfg, 32);
    const Matrix ref = validation::oracle_process(d.recording, d.calibration, kSrate,
                                                  cfg.effective_calibration_params(), cfg.processing);
    const auto rep = validation::compare(run.output, ref, kOracleRelTol);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    worst = std::max(worst, rep.max_rel_error);
    slowest = std::max(slowest, secs);
    ok = ok && rep.pass && run.counters.chunks_dropped == 0 && secs < kOracleSecondsPerSpec;
  }
  return {ok, "5 specs, max rel error " + fmt(worst) + " (tol " + fmt(kOracleRelTol) + "), slowest " +
                  fmt(slowest) + " s"};
}

// 2. Every chunk comes back with its own shape.
Outcome shape_contract(const test::TempDir& dir) {
  const auto d = validation::generate_synthetic(burst_spec());
  const auto calib = asr_calibrate(d.calibration, kSrate);
  bool ok = true;
  long chunks = 0;
  for (Eigen::Index size : {1, 7, 8, 32, 250}) {
    Processor proc(calib);
    for (Eigen::Index off = 0; off < d.recording.cols(); off += size) {
      const Eigen::Index len = std::min(size, d.recording.cols() - off);
      const auto out = proc.process({d.recording.middleCols(off, len), kSrate, off});
      ok = ok && out.channels() == kChannels && out.samples() == len && out.first_sample_index == off;
      ++chunks;
    }
  }
  // The runtime delivers one equal-size output chunk per input chunk.
  const auto csv = dir / "ac2.csv";
  io::save_calibration_csv(csv, d.calibration);
  const Matrix part = d.recording.leftCols(static_cast<Eigen::Index>(10 * kSrate));
  for (Eigen::Index size : {1, 7, 8, 32, 250}) {
    const auto run = validation::process_with_runtime(part, runtime_config(csv), size);
    ok = ok && run.output.rows() == part.rows() && run.output.cols() == part.cols() &&
         run.counters.chunks_in == run.counters.chunks_out && run.counters.chunks_dropped == 0;
  }
  return {ok, std::to_string(chunks) + " core chunks over sizes {1,7,8,32,250}, runtime sample counts equal"};
}

// 3. Clean data with a high cutoff leaves the signal untouched.
Outcome identity_path() {
  validation::SyntheticSpec s = base_spec(7);
  const auto d = validation::generate_synthetic(s);
  CalibrationParams p;
  p.cutoff = kIdentityCutoff;
  const auto calib = asr_calibrate(d.calibration, kSrate, p);
  ProcessorState state(calib);
  const Eigen::Index lag = state.lookahead();
  Matrix out = d.recording;
  double worst = 0.0;
  long checked = 0;
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    asr_process_inplace(out.col(t), calib, state);
    if (t >= lag && state.current_is_identity && state.previous_is_identity) {
      worst = std::max(worst, (out.col(t) - d.recording.col(t - lag)).cwiseAbs().maxCoeff());
      ++checked;
    }
  }
  const double fraction =
      static_cast<double>(state.identity_update_count) / static_cast<double>(state.update_count);
  const bool ok = fraction >= kIdentityUpdateFraction && worst <= kIdentityPathAbsTol && checked > 0;
  return {ok, "identity updates " + std::to_string(state.identity_update_count) + "/" +
                  std::to_string(state.update_count) + " (" + fmt(fraction) + "), max deviation " +
                  fmt(worst) + " over " + std::to_string(checked) + " samples"};
}

// 4. Bursts are attenuated, clean stretches preserved.
Outcome attenuation(const test::TempDir& dir) {
  const auto d = validation::generate_synthetic(burst_spec());
  const auto csv = dir / "ac4.csv";
  io::save_calibration_csv(csv, d.calibration);
  const auto cfg = runtime_config(csv);
  const auto run = validation::process_with_runtime(d.recording, cfg, 32);
  const Eigen::Index lag = ProcessorState(runtime::load_or_calibrate(cfg), cfg.processing).lookahead();
  const Eigen::Index n = d.recording.cols() - lag;
  const Matrix cleaned = validation::align_output(run.output, lag);
  const std::vector<bool> mask(d.mask.begin(), d.mask.begin() + n);
  const auto m = validation::attenuation_metrics(cleaned, d.recording.leftCols(n), mask);
  const bool ok = m.artifact_reduction && m.clean_change && *m.artifact_reduction >= kMinArtifactReduction &&
                  *m.clean_change <= kMaxCleanChange;
  return {ok, "reduction " + fmt(m.artifact_reduction.value_or(-1)) + " (>= " + fmt(kMinArtifactReduction) +
                  "), clean change " + fmt(m.clean_change.value_or(-1)) + " (<= " + fmt(kMaxCleanChange) + ")"};
}

// 5. Chunk size does not change the output.
Outcome chunk_invariance() {
  const auto d = validation::generate_synthetic(burst_spec());
  const auto calib = asr_calibrate(d.calibration, kSrate);
  const Matrix a = validation::process_in_chunks(d.recording, calib, {}, 8);
  const Matrix b = validation::process_in_chunks(d.recording, calib, {}, 250);
  const auto rep = validation::compare(a, b, kChunkInvarianceRelTol);
  return {rep.pass, "chunks 8 vs 250 over 60 s: max rel error " + fmt(rep.max_rel_error) + " (tol " +
                        fmt(kChunkInvarianceRelTol) + ")"};
}

// 6. process() is allocation and lock free; release() joins quickly.
Outcome realtime_safety(const test::TempDir& dir) {
  const auto d = validation::generate_synthetic(burst_spec());
  const auto csv = dir / "ac6.csv";
  io::save_calibration_csv(csv, d.calibration);
  runtime::PipelineConfig cfg = runtime_config(csv);
  cfg.chunk_capacity = 32;
  cfg.fifo_capacity = 4;
  runtime::SideChannelRegistry reg;
  reg.register_variable("eeg", kChannels, 64);
  runtime::Pipeline p;
  p.prepare(cfg, reg);
  test::rt::Counts total;
  const Eigen::Index cycles = d.recording.cols() / 64;
  for (Eigen::Index c = 0; c < cycles; ++c) {
    if (c == cycles / 3) p.set_worker_paused(true); // exercise the drop path
    if (c == cycles / 3 + 40) p.set_worker_paused(false);
    reg.write("eeg", d.recording.middleCols(c * 64, 64));
    test::rt::begin();
    p.process();
    const auto counts = test::rt::end();
    total.allocations += counts.allocations;
    total.locks += counts.locks;
    if (c % 4 == 0) std::this_thread::sleep_for(std::chrono::microseconds(200));
  }
  const auto counters = p.counters();
  // Release while the worker is still busy.
  reg.write("eeg", d.recording.leftCols(64));
  p.process();
  p.release();
  const auto join = p.last_join_time();
  const bool ok = total.allocations == 0 && total.locks == 0 && join < kMaxJoin && counters.chunks_out > 0 &&
                  counters.chunks_dropped > 0;
  return {ok, std::to_string(cycles) + " process() calls: " + std::to_string(total.allocations) +
                  " allocations, " + std::to_string(total.locks) + " locks, " +
                  std::to_string(counters.chunks_dropped) + " drops; join " +
                  std::to_string(join.count()) + " us"};
}

// 7. Throughput at 24 channels, 500 Hz.
Outcome throughput(const test::TempDir& dir) {
  validation::SyntheticSpec s;
  s.channels = 24;
  s.srate = 500.0;
  s.duration_s = 60.0;
  s.calibration_duration_s = 60.0;
  s.seed = 77;
  s.events.push_back({20.0, 2.0, {}, 10.0});
  const auto d = validation::generate_synthetic(s);
  const auto calib = asr_calibrate(d.calibration, s.srate);

  auto t0 = Clock::now();
  const Matrix core = validation::process_in_chunks(d.recording, calib, {}, 32);
  const double core_secs = std::chrono::duration<double>(Clock::now() - t0).count();

  const auto csv = dir / "ac7.csv";
  io::save_calibration_csv(csv, d.calibration);
  runtime::PipelineConfig cfg = runtime_config(csv);
  cfg.sampling_rate = s.srate;
  t0 = Clock::now();
  const auto run = validation::process_with_runtime(d.recording, cfg, 32);
  const double runtime_secs = std::chrono::duration<double>(Clock::now() - t0).count();

  const double core_rtf = s.duration_s / core_secs;
  const double runtime_rtf = s.duration_s / runtime_secs; // includes calibration in prepare()
  const bool ok = core_rtf >= kMinRealtimeFactor && runtime_rtf >= kMinRealtimeFactor &&
                  run.output.cols() == core.cols();
  return {ok, "core " + fmt(core_rtf) + "x, full runtime incl. prepare " + fmt(runtime_rtf) + "x (>= " +
                  fmt(kMinRealtimeFactor) + "x)"};
}

// 8. Numerical kernels.
Outcome kernel_suites() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count(5, 40);
  double gm = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix pts = test::gaussian(3, count(rng), 5000 + static_cast<std::uint64_t>(t));
    gm = std::max(gm, (geometric_median(pts) - test::newton_geometric_median(pts)).norm());
  }
  double sq = 0.0;
  double eig = 0.0;
  double penrose = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Matrix b = test::gaussian(8, 8, seed);
    const Matrix a = b * b.transpose();
    const Matrix s = matrix_sqrt_psd(a);
    sq = std::max(sq, test::rel_fro(s * s, a));
    const Matrix sym = test::random_symmetric(8, seed + 100);
    const auto e = symmetric_eig(sym);
    eig = std::max(eig, (sym * e.vectors - e.vectors * e.values.asDiagonal()).norm() / sym.norm());
    const Matrix r = test::gaussian(6, 4, seed + 200) * test::gaussian(4, 6, seed + 300);
    const Matrix p = pinv(r);
    penrose = std::max({penrose, (r * p * r - r).norm() / r.norm(), (p * r * p - p).norm() / p.norm(),
                        ((r * p).transpose() - r * p).norm(), ((p * r).transpose() - p * r).norm()});
  }
  FilterCoefficients f;
  f.b = {0.2, 0.3, -0.1};
  f.a = {1.0, -0.5, 0.2};
  const Matrix x = test::gaussian(2, 1000, 9);
  IirFilterState whole_state(f, 2);
  const Matrix whole = iir_filter(x, f, whole_state);
  IirFilterState chunk_state(f, 2);
  Matrix chunked(2, 1000);
  for (Eigen::Index off = 0; off < 1000; off += 7) {
    const Eigen::Index len = std::min<Eigen::Index>(7, 1000 - off);
    chunked.middleCols(off, len) = iir_filter(x.middleCols(off, len), f, chunk_state);
  }
  const double filt = (whole - chunked).cwiseAbs().maxCoeff();
  const bool ok = gm <= kGeometricMedianTol && sq <= kSqrtRelTol && eig <= kEigResidualRel &&
                  filt <= kFilterChunkTol && penrose <= kPenroseTol;
  return {ok, "geomedian " + fmt(gm) + ", sqrt " + fmt(sq) + ", eig " + fmt(eig) + ", iir " + fmt(filt) +
                  ", pinv " + fmt(penrose)};
}

// 9. Format round trips and the window rule.
Outcome formats(const test::TempDir& dir) {
  bool ok = true;
  const Matrix m = test::gaussian(8, 500, 31, 100.0);
  io::save_calibration_csv(dir / "ac9.csv", m);
  ok = ok && io::load_calibration_csv(dir / "ac9.csv") == m;

  FilterCoefficients f;
  f.b = {1.0, -0.9};
  const auto calib = asr_calibrate(test::gaussian(8, 30 * 250, 32), kSrate, {}, f);
  io::save_calibration_state(dir / "ac9.state", calib);
  const auto back = io::load_calibration_state(dir / "ac9.state");
  ok = ok && back.mixing == calib.mixing && back.threshold == calib.threshold && back.filter.b == calib.filter.b &&
       back.filter.a == calib.filter.a && back.srate == calib.srate && back.params.cutoff == calib.params.cutoff &&
       back.params.blocksize == calib.params.blocksize && back.params.window_len == calib.params.window_len &&
       back.params.window_overlap == calib.params.window_overlap &&
       back.params.max_dims_fraction == calib.params.max_dims_fraction;

  io::save_signal_record(dir / "ac9.sig", {m, 512.0});
  const auto rec = io::load_signal_record(dir / "ac9.sig");
  ok = ok && rec.data == m && rec.srate == 512.0;

  // Window rule: 0.05 s at 250 Hz is 13 samples, below 1.5 x 32.
  const Matrix wide = test::gaussian(32, 5000, 33);
  bool calib_rule = false;
  try {
    CalibrationParams p;
    p.window_len = 0.05;
    asr_calibrate(wide, kSrate, p);
  } catch (const Error& e) {
    calib_rule = e.code() == ErrorCode::WindowTooShort &&
                 std::string(e.what()).find("1.5x the number of channels") != std::string::npos;
  }
  io::save_calibration_csv(dir / "ac9_wide.csv", wide);
  runtime::PipelineConfig cfg = runtime_config(dir / "ac9_wide.csv");
  cfg.window_length = 0.05;
  runtime::SideChannelRegistry reg;
  reg.register_variable("eeg", 32, 64);
  runtime::Pipeline p;
  bool prepare_rule = false;
  try {
    p.prepare(cfg, reg);
  } catch (const Error& e) {
    prepare_rule = e.code() == ErrorCode::WindowTooShort;
  }
  ok = ok && calib_rule && prepare_rule;
  return {ok, std::string("csv/state/record exact; window rule at calibrate ") + (calib_rule ? "ok" : "MISSING") +
                  ", at prepare " + (prepare_rule ? "ok" : "MISSING")};
}

// 10. Two full runs give identical files.
Outcome determinism(const test::TempDir& dir) {
  const auto d = validation::generate_synthetic(burst_spec());
  io::save_calibration_csv(dir / "ac10.csv", d.calibration);
  const auto cfg = runtime_config(dir / "ac10.csv");
  for (const char* name : {"ac10_a.sig", "ac10_b.sig"}) {
    const auto run = validation::process_with_runtime(d.recording, cfg, 32);
    io::save_signal_record(dir / name, {run.output, kSrate});
  }
  const std::string a = io::read_file(dir / "ac10_a.sig");
  const std::string b = io::read_file(dir / "ac10_b.sig");
  return {a == b && !a.empty(), "two runtime runs, " + std::to_string(a.size()) + "-byte output files " +
                                    (a == b ? "identical" : "DIFFER")};
}

} // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  test::TempDir dir("acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", [&] { return oracle_equivalence(dir); }},
      {"shape contract", [&] { return shape_contract(dir); }},
      {"identity path", [] { return identity_path(); }},
      {"artifact attenuation", [&] { return attenuation(dir); }},
      {"chunking invariance", [] { return chunk_invariance(); }},
      {"real-time safety", [&] { return realtime_safety(dir); }},
      {"throughput", [&] { return throughput(dir); }},
      {"kernel suites", [] { return kernel_suites(); }},
      {"format round trips", [&] { return formats(dir); }},
      {"determinism", [&] { return determinism(dir); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("AC%zu %s: %s -- %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
