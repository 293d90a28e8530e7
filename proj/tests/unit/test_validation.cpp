#include "asr/core/calibrate.hpp"
#include "asr/core/error.hpp"
#include "asr/validation/compare.hpp"
#include "asr/validation/oracle.hpp"
#include "asr/validation/synthetic.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace asr;
using namespace asr::validation;

TEST_SUITE("synthetic") {
  TEST_CASE("no events: clean mask, matching statistics") {
    SyntheticSpec spec;
    spec.channels = 4;
    spec.duration_s = 30;
    spec.calibration_duration_s = 30;
    const auto d = generate_synthetic(spec);
    CHECK(d.calibration.rows() == 4);
    CHECK(d.calibration.cols() == 7500);
    CHECK(d.recording.cols() == 7500);
    CHECK(std::none_of(d.mask.begin(), d.mask.end(), [](bool b) { return b; }));
    const Matrix cc = d.calibration * d.calibration.transpose() / 7500.0;
    const Matrix rc = d.recording * d.recording.transpose() / 7500.0;
    CHECK(test::rel_fro(rc, cc) < 0.15);
  }

  TEST_CASE("one burst marks round(srate) samples") {
    SyntheticSpec spec;
    spec.duration_s = 20;
    spec.calibration_duration_s = 10;
    spec.events.push_back({5.0, 1.0, {1, 0, 0, 0, 0, 0, 0, 0}, 10.0});
    const auto d = generate_synthetic(spec);
    CHECK(std::count(d.mask.begin(), d.mask.end(), true) == 250);
    CHECK(d.mask[1250]);
    CHECK(d.mask[1499]);
    CHECK_FALSE(d.mask[1249]);
    CHECK_FALSE(d.mask[1500]);
    // Along the burst direction the power rises by about 1 + amplitude^2.
    const double burst = d.recording.row(0).segment(1250, 250).squaredNorm() / 250.0;
    const double clean = d.recording.row(0).head(1250).squaredNorm() / 1250.0;
    CHECK(burst > 50.0 * clean);
    CHECK(burst < 200.0 * clean);
  }

  TEST_CASE("same seed twice is bit identical") {
    SyntheticSpec spec;
    spec.duration_s = 10;
    spec.calibration_duration_s = 10;
    spec.events.push_back({2.0, 0.5, {1, 0, 0, 0, 0, 0, 0, 0}, 8.0});
    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    CHECK(a.calibration == b.calibration);
    CHECK(a.recording == b.recording);
    CHECK(a.mask == b.mask);
    spec.seed += 1;
    CHECK_FALSE(generate_synthetic(spec).recording == a.recording);
  }

  TEST_CASE("events outside the recording") {
    SyntheticSpec spec;
    spec.duration_s = 10;
    spec.events.push_back({9.5, 1.0, {}, 10.0});
    try {
      generate_synthetic(spec);
      FAIL("expected InvalidSpec");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidSpec);
    }
  }
}

TEST_SUITE("compare") {
  TEST_CASE("identical inputs pass at zero tolerance") {
    const Matrix a = test::gaussian(3, 100, 81);
    const auto r = compare(a, a, 0.0);
    CHECK(r.pass);
    CHECK(r.max_rel_error == 0.0);
    CHECK_FALSE(r.first_divergent_sample.has_value());
  }

  TEST_CASE("uniform 2e-5 scaling") {
    const Matrix a = test::gaussian(3, 100, 82);
    const Matrix b = a * (1.0 + 2e-5);
    CHECK_FALSE(compare(a, b, 1e-5).pass);
    CHECK(compare(a, b, 1e-4).pass);
    CHECK(compare(a, b, 1e-5).first_divergent_sample == 0);
  }

  TEST_CASE("first divergent sample and report text") {
    Matrix a = Matrix::Ones(2, 10);
    Matrix b = a;
    b(1, 7) = 1.5;
    const auto r = compare(a, b, 1e-3);
    CHECK_FALSE(r.pass);
    CHECK(r.first_divergent_sample == 7);
    CHECK(r.max_abs_error == 0.5);
    CHECK(r.to_key_values().find("pass=false") != std::string::npos);
  }

  TEST_CASE("zeros compare equal") {
    CHECK(compare(Matrix::Zero(2, 3), Matrix::Zero(2, 3), 0.0).pass);
  }

  TEST_CASE("shape mismatch") {
    try {
      compare(Matrix::Zero(2, 3), Matrix::Zero(3, 2), 1e-5);
      FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ShapeMismatch);
    }
  }
}

TEST_SUITE("attenuation") {
  TEST_CASE("unchanged signal") {
    const Matrix raw = test::gaussian(2, 100, 83);
    std::vector<bool> mask(100, false);
    std::fill(mask.begin() + 20, mask.begin() + 40, true);
    const auto m = attenuation_metrics(raw, raw, mask);
    CHECK(*m.artifact_reduction == 0.0);
    CHECK(*m.clean_change == 0.0);
  }

  TEST_CASE("zeroed artifact samples") {
    const Matrix raw = test::gaussian(2, 100, 84);
    std::vector<bool> mask(100, false);
    std::fill(mask.begin() + 20, mask.begin() + 40, true);
    Matrix cleaned = raw;
    cleaned.middleCols(20, 20).setZero();
    const auto m = attenuation_metrics(cleaned, raw, mask);
    CHECK(*m.artifact_reduction == 1.0);
    CHECK(*m.clean_change == 0.0);
  }

  TEST_CASE("empty mask leaves the reduction undefined") {
    const Matrix raw = test::gaussian(2, 50, 85);
    const auto m = attenuation_metrics(raw, raw, std::vector<bool>(50, false));
    CHECK_FALSE(m.artifact_reduction.has_value());
    REQUIRE(m.clean_change.has_value());
  }

  TEST_CASE("alignment drops the lookahead") {
    const Matrix out = test::gaussian(2, 10, 86);
    const Matrix aligned = align_output(out, 3);
    CHECK(aligned.cols() == 7);
    CHECK(aligned == out.rightCols(7));
  }
}

TEST_SUITE("oracle") {
  TEST_CASE("clean data with a large cutoff passes the input through") {
    const Matrix cal = test::gaussian(4, 60 * 250, 87);
    const Matrix rec = test::gaussian(4, 10 * 250, 88);
    CalibrationParams p;
    p.cutoff = 50.0;
    const Matrix out = oracle_process(rec, cal, 250.0, p);
    const Eigen::Index lag = 63;
    CHECK(out.leftCols(lag).cwiseAbs().maxCoeff() == 0.0);
    CHECK((out.rightCols(rec.cols() - lag) - rec.leftCols(rec.cols() - lag)).cwiseAbs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("the oracle compared with itself passes at zero tolerance") {
    SyntheticSpec spec;
    spec.duration_s = 10;
    spec.calibration_duration_s = 20;
    spec.events.push_back({3.0, 1.0, {}, 10.0});
    const auto d = generate_synthetic(spec);
    const Matrix a = oracle_process(d.recording, d.calibration, 250.0, {});
    const Matrix b = oracle_process(d.recording, d.calibration, 250.0, {});
    CHECK(compare(a, b, 0.0).pass);
  }
}
