#include "asr/validation/oracle.hpp"

#include "asr/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace asr::validation {

namespace {

// Same stopping constants as the streaming implementation.
constexpr double kWeiszfeldTol = 1e-12;
constexpr int kWeiszfeldMaxIter = 10000;
constexpr double kMad = 1.4826;
constexpr std::size_t kMinWindows = 8;

double median_sorted_copy(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Vector weiszfeld(const std::vector<std::vector<double>>& points) {
  const std::size_t dim = points.front().size();
  std::vector<double> y(dim, 0.0);
  for (const auto& p : points)
    for (std::size_t k = 0; k < dim; ++k) y[k] += p[k];
  for (double& v : y) v /= static_cast<double>(points.size());

  std::vector<double> num(dim);
  for (int iter = 0; iter < kWeiszfeldMaxIter; ++iter) {
    std::fill(num.begin(), num.end(), 0.0);
    double den = 0.0;
    for (const auto& p : points) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d2 += (p[k] - y[k]) * (p[k] - y[k]);
      const double d = std::sqrt(d2);
      if (d == 0.0) continue;
      for (std::size_t k = 0; k < dim; ++k) num[k] += p[k] / d;
      den += 1.0 / d;
    }
    if (den == 0.0) break;
    double step2 = 0.0;
    double norm2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double next = num[k] / den;
      step2 += (next - y[k]) * (next - y[k]);
      norm2 += next * next;
      y[k] = next;
    }
    if (std::sqrt(step2) < kWeiszfeldTol * (1.0 + std::sqrt(norm2))) break;
  }
  Vector out(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) out(static_cast<Eigen::Index>(k)) = y[k];
  return out;
}

// Lower Cholesky factor of an SPD matrix.
Matrix cholesky(const Matrix& g) {
  const Eigen::Index n = g.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = g(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw Error(ErrorCode::CalibrationDegenerate, "oracle: Gram matrix not SPD");
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

// Solves (L L^T) X = B column by column.
Matrix cholesky_solve(const Matrix& l, const Matrix& b) {
  const Eigen::Index n = l.rows();
  Matrix x = b;
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = x(i, c);
      for (Eigen::Index k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      double s = x(i, c);
      for (Eigen::Index k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

} // namespace

JacobiEigen jacobi_eigen(const Matrix& symmetric) {
  const Eigen::Index n = symmetric.rows();
  Matrix a = symmetric;
  Matrix v = Matrix::Identity(n, n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) total += a(i, j) * a(i, j);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-32 * total) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
  JacobiEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.values(i) = a(src, src);
    out.vectors.col(i) = v.col(src);
    // Largest-magnitude entry positive, first one on ties.
    Eigen::Index lead = 0;
    for (Eigen::Index k = 1; k < n; ++k)
      if (std::abs(out.vectors(k, i)) > std::abs(out.vectors(lead, i))) lead = k;
    if (out.vectors(lead, i) < 0.0) out.vectors.col(i) *= -1.0;
  }
  return out;
}

Matrix oracle_filter(const Matrix& data, const FilterCoefficients& coeffs) {
  FilterCoefficients f = coeffs;
  f.normalize();
  Matrix y = Matrix::Zero(data.rows(), data.cols());
  for (Eigen::Index ch = 0; ch < data.rows(); ++ch) {
    for (Eigen::Index n = 0; n < data.cols(); ++n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < f.b.size(); ++k) {
        const Eigen::Index idx = n - static_cast<Eigen::Index>(k);
        if (idx < 0) break;
        acc += f.b[k] * data(ch, idx);
      }
      for (std::size_t k = 1; k < f.a.size(); ++k) {
        const Eigen::Index idx = n - static_cast<Eigen::Index>(k);
        if (idx < 0) break;
        acc -= f.a[k] * y(ch, idx);
      }
      y(ch, n) = acc;
    }
  }
  if (!y.allFinite()) throw Error(ErrorCode::FilterDiverged, "oracle filter output is not finite");
  return y;
}

CalibrationState oracle_calibrate(const Matrix& clean, double srate,
                                  const CalibrationParams& params,
                                  const FilterCoefficients& filter) {
  params.validate();
  const Eigen::Index c = clean.rows();
  const Eigen::Index n = clean.cols();
  check_window_rule(params.window_len, srate, c);
  const auto window = static_cast<Eigen::Index>(std::lround(params.window_len * srate));
  if (n < window) throw Error(ErrorCode::InsufficientData, "oracle: calibration shorter than window");

  CalibrationState st;
  st.params = params;
  st.srate = srate;
  st.filter = filter;
  st.filter.normalize();
  const Matrix x = oracle_filter(clean, st.filter);

  // Block covariances as flattened (column-major) vectors.
  const Eigen::Index blocks = n / params.blocksize;
  if (blocks < 1) throw Error(ErrorCode::InsufficientData, "oracle: no complete block");
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<std::size_t>(blocks));
  for (Eigen::Index b = 0; b < blocks; ++b) {
    std::vector<double> p(static_cast<std::size_t>(c * c), 0.0);
    for (Eigen::Index s = b * params.blocksize; s < (b + 1) * params.blocksize; ++s)
      for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < c; ++i)
          p[static_cast<std::size_t>(j * c + i)] += x(i, s) * x(j, s);
    for (double& v : p) v /= static_cast<double>(params.blocksize);
    points.push_back(std::move(p));
  }
  const Vector med = weiszfeld(points);
  Matrix cov(c, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < c; ++i) cov(i, j) = med(j * c + i);
  for (Eigen::Index i = 0; i < c; ++i)
    for (Eigen::Index j = i + 1; j < c; ++j) cov(i, j) = cov(j, i) = 0.5 * (cov(i, j) + cov(j, i));

  double trace = 0.0;
  for (Eigen::Index i = 0; i < c; ++i) trace += cov(i, i);
  if (!(trace > 0.0)) throw Error(ErrorCode::CalibrationDegenerate, "oracle: zero trace");
  const double floor = 1e-12 * trace / static_cast<double>(c);
  const JacobiEigen ce = jacobi_eigen(cov);
  Matrix m = Matrix::Zero(c, c);
  for (Eigen::Index k = 0; k < c; ++k) {
    const double root = std::sqrt(std::max(ce.values(k), floor));
    for (Eigen::Index i = 0; i < c; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) += ce.vectors(i, k) * root * ce.vectors(j, k);
  }
  st.mixing = m;

  const JacobiEigen me = jacobi_eigen(m);
  const Matrix& v = me.vectors;
  const auto stride = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::lround(static_cast<double>(window) * (1.0 - params.window_overlap))));

  st.threshold = Matrix::Zero(c, c);
  for (Eigen::Index k = 0; k < c; ++k) {
    std::vector<double> comp(static_cast<std::size_t>(n));
    for (Eigen::Index s = 0; s < n; ++s) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < c; ++i) acc += v(i, k) * x(i, s);
      comp[static_cast<std::size_t>(s)] = acc;
    }
    std::vector<double> rms;
    for (Eigen::Index start = 0; start + window <= n; start += stride) {
      double sq = 0.0;
      for (Eigen::Index s = start; s < start + window; ++s)
        sq += comp[static_cast<std::size_t>(s)] * comp[static_cast<std::size_t>(s)];
      rms.push_back(std::sqrt(sq / static_cast<double>(window)));
    }
    if (rms.size() < kMinWindows) throw Error(ErrorCode::InsufficientData, "oracle: too few windows");
    const double mu = median_sorted_copy(rms);
    std::vector<double> dev;
    for (double r : rms) dev.push_back(std::abs(r - mu));
    const double sigma = kMad * median_sorted_copy(dev);
    const double limit = mu + params.cutoff * sigma;
    for (Eigen::Index i = 0; i < c; ++i) st.threshold(k, i) = limit * v(i, k);
  }
  return st;
}

Matrix oracle_reconstruction(const Matrix& cov, const CalibrationState& calib, int* n_rejected) {
  const Eigen::Index c = cov.rows();
  const JacobiEigen e = jacobi_eigen(cov);
  const int budget = rejection_budget(calib.params.max_dims_fraction, c);

  std::vector<Eigen::Index> kept;
  int rejected = 0;
  for (Eigen::Index j = 0; j < c; ++j) {
    double limit = 0.0;
    for (Eigen::Index i = 0; i < c; ++i) {
      double tv = 0.0;
      for (Eigen::Index k = 0; k < c; ++k) tv += calib.threshold(i, k) * e.vectors(k, j);
      limit += tv * tv;
    }
    const bool reject = j >= c - budget && e.values(j) > limit;
    if (reject) ++rejected;
    else kept.push_back(j);
  }
  if (n_rejected) *n_rejected = rejected;
  if (rejected == 0) return Matrix::Identity(c, c);

  // pinv of V^T M with rejected rows zeroed = B_S^T (B_S B_S^T)^-1 on the kept
  // columns, zero on the rejected ones (B_S has full row rank).
  const Matrix b = naive_product(e.vectors.transpose(), calib.mixing);
  const auto m = static_cast<Eigen::Index>(kept.size());
  Matrix bs(m, c);
  for (Eigen::Index r = 0; r < m; ++r) bs.row(r) = b.row(kept[static_cast<std::size_t>(r)]);
  const Matrix gram = naive_product(bs, bs.transpose());
  const Matrix ginv = cholesky_solve(cholesky(gram), Matrix::Identity(m, m));
  const Matrix ps = naive_product(bs.transpose(), ginv);
  Matrix p = Matrix::Zero(c, c);
  for (Eigen::Index r = 0; r < m; ++r) p.col(kept[static_cast<std::size_t>(r)]) = ps.col(r);
  return naive_product(naive_product(calib.mixing, p), e.vectors.transpose());
}

Matrix oracle_process(const Matrix& recording, const CalibrationState& calib,
                      const ProcessParams& params) {
  const Eigen::Index c = recording.rows();
  const Eigen::Index n = recording.cols();
  if (c != calib.channels()) throw Error(ErrorCode::ChannelMismatch, "oracle: channel mismatch");
  if (!recording.allFinite()) throw Error(ErrorCode::InvalidInput, "oracle: non-finite input");
  const auto window = static_cast<Eigen::Index>(std::lround(calib.params.window_len * calib.srate));
  const Eigen::Index lookahead =
      params.lookahead >= 0 ? params.lookahead
                            : static_cast<Eigen::Index>(std::lround(static_cast<double>(window) / 2.0));
  const int step = params.stepsize;

  const Matrix f = oracle_filter(recording, calib.filter);
  Matrix out = Matrix::Zero(c, n);
  Matrix r_cur = Matrix::Identity(c, c);
  Matrix r_prev = Matrix::Identity(c, c);

  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index t = i + 1;
    if (t % step == 0) {
      const Eigen::Index first = std::max<Eigen::Index>(0, t - window);
      const auto count = static_cast<double>(t - first);
      Matrix cov = Matrix::Zero(c, c);
      for (Eigen::Index s = first; s < t; ++s)
        for (Eigen::Index a = 0; a < c; ++a)
          for (Eigen::Index b = 0; b < c; ++b) cov(a, b) += f(a, s) * f(b, s);
      cov /= count;
      r_prev = r_cur;
      r_cur = oracle_reconstruction(cov, calib);
    }
    const Eigen::Index src = i - lookahead;
    if (src < 0) continue;
    const double w =
        0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(t % step + 1) / step));
    for (Eigen::Index a = 0; a < c; ++a) {
      double acc = 0.0;
      for (Eigen::Index b = 0; b < c; ++b)
        acc += (w * r_cur(a, b) + (1.0 - w) * r_prev(a, b)) * recording(b, src);
      out(a, i) = acc;
    }
  }
  return out;
}

Matrix oracle_process(const Matrix& recording, const Matrix& calibration_data, double srate,
                      const CalibrationParams& calibration_params,
                      const ProcessParams& process_params, const FilterCoefficients& filter) {
  const CalibrationState calib = oracle_calibrate(calibration_data, srate, calibration_params, filter);
  return oracle_process(recording, calib, process_params);
}

} // namespace asr::validation
