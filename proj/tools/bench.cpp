// Benchmark of the OpenMP-parallel kernels against their serial reference
// implementations. Each kernel is timed on a realistic workload and the two
// results are compared for equality, so this doubles as a consistency check:
// the exit code is non-zero when any kernel disagrees with its reference.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "excite/changepoint.hpp"
#include "excite/epimodels.hpp"
#include "excite/estimators.hpp"
#include "excite/metrics.hpp"
#include "excite/rng.hpp"
#include "excite/sim.hpp"
#include "excite/signal.hpp"
#include "excite/types.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f) {
  const auto start = Clock::now();
  f();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

// Equality that treats matching infinities as equal (kappa can be +inf).
double diff(double a, double b) {
  if (a == b) return 0.0;  // covers inf == inf
  return std::abs(a - b);
}

struct Row {
  const char* name;
  double serial_ms = 0.0;
  double parallel_ms = 0.0;
  double max_diff = 0.0;
  bool equal = true;
};

std::vector<excite::Datum> random_stream(std::int64_t count, Eigen::Index rows,
                                         Eigen::Index p) {
  auto rng = excite::substream(20240915, "bench");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<excite::Datum> stream(count);
  for (std::int64_t k = 0; k < count; ++k) {
    excite::Datum& d = stream[k];
    d.k = k;
    d.t = 0.1 * static_cast<double>(k);
    d.phi.resize(rows, p);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        d.phi(i, j) = gauss(rng);
      }
    }
    d.psi = excite::Vector::Zero(rows);
  }
  return stream;
}

Row bench_moving_pi() {
  const auto stream = random_stream(2000, 4, 8);
  const int window = 250;

  std::vector<excite::PiReport> serial, parallel;
  Row row{"moving_pi"};
  row.serial_ms = time_ms([&] { serial = excite::moving_pi_serial(stream, window); });
  row.parallel_ms = time_ms([&] { parallel = excite::moving_pi(stream, window); });

  row.equal = serial.size() == parallel.size();
  for (std::size_t i = 0; row.equal && i < serial.size(); ++i) {
    row.equal = serial[i].first == parallel[i].first && serial[i].last == parallel[i].last;
    for (double d : {diff(serial[i].lambda_min, parallel[i].lambda_min),
                     diff(serial[i].lambda_max, parallel[i].lambda_max),
                     diff(serial[i].kappa, parallel[i].kappa)}) {
      row.max_diff = std::max(row.max_diff, d);
    }
  }
  row.equal = row.equal && row.max_diff == 0.0;
  return row;
}

Row bench_rmse_surface() {
  excite::SisParams params{0.12, 0.04};
  const auto trajectory = excite::simulate_sis(
      excite::Schedule<excite::SisParams>::constant(params), 0.01, 0.1, 3000, {}, 99);

  excite::Vector betas = excite::Vector::LinSpaced(96, 0.02, 0.30);
  excite::Vector gammas = excite::Vector::LinSpaced(96, 0.005, 0.145);

  excite::Matrix serial, parallel;
  Row row{"rmse_surface"};
  row.serial_ms = time_ms(
      [&] { serial = excite::rmse_surface_serial(trajectory.data, betas, gammas); });
  row.parallel_ms =
      time_ms([&] { parallel = excite::rmse_surface(trajectory.data, betas, gammas); });

  row.equal = serial.rows() == parallel.rows() && serial.cols() == parallel.cols();
  if (row.equal) {
    row.max_diff = (serial - parallel).cwiseAbs().maxCoeff();
    row.equal = row.max_diff == 0.0;
  }
  return row;
}

Row bench_roc_points() {
  using excite::Vector;

  // Two-node SIR stream with periodic transmissibility switches, the shape
  // the ROC sweep evaluates detectors on.
  excite::SirNetworkParams base;
  base.b.resize(2, 2);
  base.b << 0.35, 0.15, 0.20, 0.30;
  base.gamma = (Vector(2) << 0.10, 0.12).finished();

  const double h = 0.2;
  const std::int64_t steps = 300;
  const std::vector<std::int64_t> change_points = {60, 100, 140, 180, 220, 260};

  excite::Schedule<excite::SirNetworkParams> schedule;
  schedule.segments.push_back({0.0, base});
  for (std::size_t i = 0; i < change_points.size(); ++i) {
    excite::SirNetworkParams scaled = base;
    scaled.b *= (i % 2 == 0) ? 0.4 : 1.0;
    schedule.segments.push_back({static_cast<double>(change_points[i]) * h, scaled});
  }

  excite::NoiseConfig noise;
  noise.process = excite::ProcessNoise::kStateScaled;
  noise.scale = 0.05;
  noise.obs_rel_std = 0.1;
  noise.targets = excite::TargetKind::kDrift;

  const Vector i0 = Vector::Constant(2, 0.005);
  const Vector r0 = Vector::Zero(2);
  const auto trajectory =
      excite::simulate_sir(schedule, i0, r0, h, steps, noise, excite::fold_seed(1, 0));

  const Eigen::Index p = base.theta().size();
  const auto runner = [&](double tau) {
    excite::GwRlsOptions gw_options;
    gw_options.alpha = 0.99;
    gw_options.excitation_cap = 15;
    auto inner = std::make_unique<excite::GwRls>(
        Vector::Ones(p), 1e5 * excite::Matrix::Identity(p, p), gw_options);
    excite::LrtOptions lrt;
    lrt.eta = 0.3;
    lrt.tau = tau;
    lrt.min_samples = 10;
    lrt.reset_on_change = true;
    excite::ResettingEstimator pipeline(std::move(inner), excite::LrtDetector(lrt));
    std::vector<std::int64_t> detections;
    for (const auto& d : trajectory.data) {
      if (pipeline.step(d).detection.detected) {
        detections.push_back(d.k);
      }
    }
    return detections;
  };

  excite::RocScenario scenario;
  scenario.change_points = change_points;
  scenario.window = 10;
  scenario.stream_len = steps;
  const std::vector<double> taus = {1e-5, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.3, 1.0};

  std::vector<excite::RocPoint> serial, parallel;
  Row row{"roc_points"};
  row.serial_ms =
      time_ms([&] { serial = excite::roc_points_serial(scenario, taus, runner); });
  row.parallel_ms = time_ms([&] { parallel = excite::roc_points(scenario, taus, runner); });

  row.equal = serial.size() == parallel.size();
  for (std::size_t i = 0; row.equal && i < serial.size(); ++i) {
    row.equal = serial[i].tp == parallel[i].tp && serial[i].fp == parallel[i].fp &&
                serial[i].fn == parallel[i].fn &&
                diff(serial[i].tpr, parallel[i].tpr) == 0.0 &&
                diff(serial[i].fp_rate, parallel[i].fp_rate) == 0.0;
  }
  return row;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n");
#endif
  std::printf("Speedups track the available core count; on a single core the\n");
  std::printf("comparison only verifies that both implementations agree.\n\n");

  const Row rows[] = {bench_moving_pi(), bench_rmse_surface(), bench_roc_points()};

  std::printf("%-14s %12s %12s %9s %11s %7s\n", "kernel", "serial[ms]", "parallel[ms]",
              "speedup", "max|diff|", "equal");
  bool all_equal = true;
  for (const Row& row : rows) {
    const double speedup =
        row.parallel_ms > 0.0 ? row.serial_ms / row.parallel_ms : 0.0;
    std::printf("%-14s %12.1f %12.1f %8.2fx %11.3g %7s\n", row.name, row.serial_ms,
                row.parallel_ms, speedup, row.max_diff, row.equal ? "yes" : "NO");
    all_equal = all_equal && row.equal;
  }
  return all_equal ? 0 : 1;
}
