#include "excite/signal.hpp"

#include <Eigen/SVD>

#include <limits>
#include <stdexcept>
#include <string>

namespace excite {
namespace {

constexpr double kRankTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Condition number from a precomputed singular-value spectrum.
double kappa_from_singular_values(const Vector& sv) {
  if (sv.size() == 0) {
    return kInf;
  }
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smax <= 0.0 || smin <= kRankTolerance * smax) {
    return kInf;
  }
  return smax / smin;
}

PiReport window_report(const std::vector<Datum>& stream, std::int64_t k, int window_len) {
  const Eigen::Index p = stream[static_cast<std::size_t>(k)].phi.cols();
  Matrix h = Matrix::Zero(p, p);
  for (std::int64_t i = k - window_len; i <= k; ++i) {
    const Matrix& phi = stream[static_cast<std::size_t>(i)].phi;
    h.noalias() += phi.transpose() * phi;
  }
  h = ((h + h.transpose()) / 2.0).eval();
  const Eigen::JacobiSVD<Matrix> svd(h);
  const Vector& sv = svd.singularValues();
  PiReport report;
  report.first = k - window_len;
  report.last = k;
  report.lambda_max = sv.size() > 0 ? sv(0) : 0.0;
  report.lambda_min = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  report.kappa = kappa_from_singular_values(sv);
  return report;
}

void check_moving_pi_args(const std::vector<Datum>& stream, int window_len) {
  if (window_len < 1) {
    throw std::invalid_argument("moving_pi: window_len must be >= 1");
  }
  if (stream.size() < static_cast<std::size_t>(window_len) + 1) {
    throw std::invalid_argument("moving_pi: stream of " + std::to_string(stream.size()) +
                                " data is shorter than window_len + 1 = " +
                                std::to_string(window_len + 1));
  }
  const Eigen::Index p = stream.front().phi.cols();
  for (const Datum& d : stream) {
    validate_datum(d, p);
  }
}

}  // namespace

double condition_number(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("condition_number: matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("condition_number: non-finite matrix");
  }
  if (m.rows() == 0) {
    return kInf;
  }
  const Eigen::JacobiSVD<Matrix> svd(m);
  return kappa_from_singular_values(svd.singularValues());
}

InfoMatrix accumulate(InfoMatrix info, const Matrix& phi) {
  if (phi.cols() != info.h.cols()) {
    throw std::invalid_argument("accumulate: regressor has " + std::to_string(phi.cols()) +
                                " columns, expected " + std::to_string(info.h.cols()));
  }
  if (!phi.allFinite()) {
    throw std::invalid_argument("accumulate: non-finite regressor");
  }
  info.h.noalias() += phi.transpose() * phi;
  info.h = ((info.h + info.h.transpose()) / 2.0).eval();
  ++info.count;
  return info;
}

std::vector<PiReport> moving_pi(const std::vector<Datum>& stream, int window_len) {
  check_moving_pi_args(stream, window_len);
  const std::int64_t n_windows = static_cast<std::int64_t>(stream.size()) - window_len;
  std::vector<PiReport> reports(static_cast<std::size_t>(n_windows));
#pragma omp parallel for schedule(static)
  for (std::int64_t w = 0; w < n_windows; ++w) {
    reports[static_cast<std::size_t>(w)] = window_report(stream, w + window_len, window_len);
  }
  return reports;
}

std::vector<PiReport> moving_pi_serial(const std::vector<Datum>& stream, int window_len) {
  check_moving_pi_args(stream, window_len);
  const std::int64_t n_windows = static_cast<std::int64_t>(stream.size()) - window_len;
  std::vector<PiReport> reports;
  reports.reserve(static_cast<std::size_t>(n_windows));
  for (std::int64_t w = 0; w < n_windows; ++w) {
    reports.push_back(window_report(stream, w + window_len, window_len));
  }
  return reports;
}

}  // namespace excite
