#include "excite/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace excite {
namespace {

void check_roc_args(const RocScenario& scenario, const std::vector<double>& tau_grid) {
  if (tau_grid.empty()) {
    throw std::invalid_argument("roc_points: empty significance grid");
  }
  if (scenario.window < 0) {
    throw std::invalid_argument("roc_points: window must be non-negative");
  }
  if (scenario.stream_len < 1) {
    throw std::invalid_argument("roc_points: stream_len must be >= 1");
  }
  for (std::size_t i = 1; i < scenario.change_points.size(); ++i) {
    const std::int64_t gap = scenario.change_points[i] - scenario.change_points[i - 1];
    if (gap <= 0) {
      throw std::invalid_argument("roc_points: change points must be strictly increasing");
    }
    if (gap <= scenario.window) {
      throw std::invalid_argument("roc_points: match windows overlap; widen the spacing");
    }
  }
}

// Claims each change point with the first detection inside its window;
// further detections inside a claimed window are ignored, detections outside
// all windows are false positives.
RocPoint score_detections(const RocScenario& scenario, double tau,
                          const std::vector<std::int64_t>& detections) {
  RocPoint point;
  point.tau = tau;
  std::vector<bool> claimed(scenario.change_points.size(), false);
  for (const std::int64_t k : detections) {
    bool in_window = false;
    for (std::size_t c = 0; c < scenario.change_points.size(); ++c) {
      const std::int64_t cp = scenario.change_points[c];
      if (k >= cp && k <= cp + scenario.window) {
        in_window = true;
        if (!claimed[c]) {
          claimed[c] = true;
          ++point.tp;
        }
        break;
      }
    }
    if (!in_window) {
      ++point.fp;
    }
  }
  point.fn = static_cast<std::int64_t>(scenario.change_points.size()) - point.tp;
  const std::int64_t positives = point.tp + point.fn;
  point.tpr = positives > 0 ? static_cast<double>(point.tp) / static_cast<double>(positives)
                            : 0.0;
  point.fp_rate = static_cast<double>(point.fp) / static_cast<double>(scenario.stream_len);
  return point;
}

}  // namespace

Vector relative_error(const Vector& truth, const Vector& estimate, double delta) {
  if (truth.size() != estimate.size() || truth.size() < 1) {
    throw std::invalid_argument("relative_error: size mismatch");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("relative_error: delta must be positive");
  }
  return ((truth - estimate).array() / (truth.array() + delta)).abs();
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median of an empty set");
  }
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) {
    return upper;
  }
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

std::vector<ErrorPoint> error_profile(const std::vector<double>& times,
                                      const std::vector<Vector>& errors) {
  if (times.empty() || times.size() != errors.size()) {
    throw std::invalid_argument("error_profile: times and errors must match and be non-empty");
  }
  std::vector<ErrorPoint> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Vector& e = errors[i];
    if (e.size() < 2) {
      throw std::invalid_argument("error_profile: need at least two components per point");
    }
    std::vector<double> values(e.data(), e.data() + e.size());
    ErrorPoint point;
    point.t = times[i];
    point.min = *std::min_element(values.begin(), values.end());
    point.max = *std::max_element(values.begin(), values.end());
    point.median = median(std::move(values));
    out.push_back(point);
  }
  return out;
}

Vector r0_error(const SirNetworkParams& truth, const SirNetworkParams& estimate,
                double delta) {
  return relative_error(local_r0(truth), local_r0(estimate), delta);
}

namespace {

double surface_cell(const std::vector<Datum>& stream, double beta, double gamma) {
  Vector theta(2);
  theta << beta, gamma;
  double sum = 0.0;
  std::int64_t count = 0;
  for (const Datum& d : stream) {
    sum += (d.psi - d.phi * theta).squaredNorm();
    count += d.psi.size();
  }
  return std::sqrt(sum / static_cast<double>(count));
}

void check_surface_args(const std::vector<Datum>& stream, const Vector& betas,
                        const Vector& gammas) {
  if (stream.empty()) {
    throw std::invalid_argument("rmse_surface: empty stream");
  }
  if (betas.size() < 1 || gammas.size() < 1) {
    throw std::invalid_argument("rmse_surface: empty grid axis");
  }
  for (const Datum& d : stream) {
    validate_datum(d, 2);
  }
}

}  // namespace

Matrix rmse_surface(const std::vector<Datum>& stream, const Vector& betas,
                    const Vector& gammas) {
  check_surface_args(stream, betas, gammas);
  Matrix out(betas.size(), gammas.size());
  const std::int64_t cells = betas.size() * gammas.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const Eigen::Index i = cell / gammas.size();
    const Eigen::Index j = cell % gammas.size();
    out(i, j) = surface_cell(stream, betas[i], gammas[j]);
  }
  return out;
}

Matrix rmse_surface_serial(const std::vector<Datum>& stream, const Vector& betas,
                           const Vector& gammas) {
  check_surface_args(stream, betas, gammas);
  Matrix out(betas.size(), gammas.size());
  for (Eigen::Index i = 0; i < betas.size(); ++i) {
    for (Eigen::Index j = 0; j < gammas.size(); ++j) {
      out(i, j) = surface_cell(stream, betas[i], gammas[j]);
    }
  }
  return out;
}

std::vector<RocPoint> roc_points(const RocScenario& scenario,
                                 const std::vector<double>& tau_grid,
                                 const DetectionRunner& runner) {
  check_roc_args(scenario, tau_grid);
  std::vector<RocPoint> out(tau_grid.size());
  const std::int64_t count = static_cast<std::int64_t>(tau_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    const double tau = tau_grid[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = score_detections(scenario, tau, runner(tau));
  }
  return out;
}

std::vector<RocPoint> roc_points_serial(const RocScenario& scenario,
                                        const std::vector<double>& tau_grid,
                                        const DetectionRunner& runner) {
  check_roc_args(scenario, tau_grid);
  std::vector<RocPoint> out;
  out.reserve(tau_grid.size());
  for (const double tau : tau_grid) {
    out.push_back(score_detections(scenario, tau, runner(tau)));
  }
  return out;
}

double roc_auc(std::vector<RocPoint> points) {
  if (points.empty()) {
    throw std::invalid_argument("roc_auc: no points");
  }
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fp_rate < b.fp_rate || (a.fp_rate == b.fp_rate && a.tpr < b.tpr);
  });
  double area = 0.0;
  double x = 0.0;
  double y = 0.0;
  for (const RocPoint& point : points) {
    area += (point.fp_rate - x) * (point.tpr + y) / 2.0;
    x = point.fp_rate;
    y = point.tpr;
  }
  if (x < 1.0) {
    area += (1.0 - x) * y;
  }
  return area;
}

}  // namespace excite
