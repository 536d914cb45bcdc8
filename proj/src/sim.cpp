#include "excite/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>

#include "excite/csv.hpp"
#include "excite/rng.hpp"

namespace excite {
namespace {

void check_sim_args(double h, std::int64_t steps, const NoiseConfig& noise) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("step size must be positive and finite");
  }
  if (steps < 1) {
    throw std::invalid_argument("steps must be >= 1");
  }
  if (!(noise.sigma >= 0.0) || !(noise.scale >= 0.0) || !(noise.obs_rel_std >= 0.0)) {
    throw std::invalid_argument("noise magnitudes must be non-negative");
  }
}

// Elementwise signed square root, used by the state-scaled noise map.
Matrix signed_sqrt(const Matrix& m) {
  return m.unaryExpr([](double v) { return std::copysign(std::sqrt(std::abs(v)), v); });
}

Vector draw_process_noise(const NoiseConfig& noise, const Matrix& phi, const Vector& theta,
                          Eigen::Index state_dim, double h, std::mt19937_64& rng,
                          std::normal_distribution<double>& gauss) {
  switch (noise.process) {
    case ProcessNoise::kNone:
      return Vector::Zero(state_dim);
    case ProcessNoise::kAdditive: {
      Vector z(state_dim);
      for (Eigen::Index i = 0; i < state_dim; ++i) {
        z[i] = gauss(rng);
      }
      return noise.sigma * std::sqrt(h) * z;
    }
    case ProcessNoise::kStateScaled: {
      Vector b(theta.size());
      const double root_h = std::sqrt(h);
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        b[i] = root_h * gauss(rng);
      }
      return noise.scale * (signed_sqrt(phi * theta.asDiagonal()) * b);
    }
  }
  throw std::logic_error("unreachable noise kind");
}

void add_observation_noise(const NoiseConfig& noise, Vector& psi, std::mt19937_64& rng,
                           std::normal_distribution<double>& gauss) {
  if (noise.obs_rel_std <= 0.0) {
    return;
  }
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    psi[i] += noise.obs_rel_std * std::abs(psi[i]) * gauss(rng);
  }
}

}  // namespace

Trajectory simulate_sis(const Schedule<SisParams>& schedule, double i0, double h,
                        std::int64_t steps, const NoiseConfig& noise, std::uint64_t seed) {
  schedule.validate();
  check_sim_args(h, steps, noise);
  if (!std::isfinite(i0) || i0 < 0.0 || i0 > 1.0) {
    throw std::invalid_argument("initial prevalence must lie in [0, 1]");
  }

  std::mt19937_64 rng_proc = substream(seed, "process");
  std::mt19937_64 rng_obs = substream(seed, "observation");
  std::normal_distribution<double> gauss;

  Trajectory out;
  out.times.reserve(static_cast<std::size_t>(steps));
  out.states.reserve(static_cast<std::size_t>(steps) + 1);
  out.data.reserve(static_cast<std::size_t>(steps));
  out.noise_draws.reserve(static_cast<std::size_t>(steps));

  double x = i0;
  out.states.push_back((Vector(1) << x).finished());
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const SisParams& params = schedule.at(t);
    const Matrix phi = sis_regressor(x);
    const double drift = sis_drift(x, params);

    const Vector xi =
        draw_process_noise(noise, phi, params.theta(), 1, h, rng_proc, gauss);
    double x_next = x + h * drift + xi[0];
    const double clamped = std::clamp(x_next, 0.0, 1.0);
    if (clamped != x_next) {
      ++out.clamp_events;
      x_next = clamped;
    }

    Vector psi(1);
    psi[0] = noise.targets == TargetKind::kDrift ? drift : (x_next - x) / h;
    add_observation_noise(noise, psi, rng_obs, gauss);

    out.times.push_back(t);
    out.noise_draws.push_back(xi);
    out.data.push_back(Datum{k, t, phi, psi});
    out.states.push_back((Vector(1) << x_next).finished());
    x = x_next;
  }
  return out;
}

Trajectory simulate_sir(const Schedule<SirNetworkParams>& schedule, const Vector& i0,
                        const Vector& r0, double h, std::int64_t steps,
                        const NoiseConfig& noise, std::uint64_t seed) {
  schedule.validate();
  check_sim_args(h, steps, noise);
  const Eigen::Index n = i0.size();
  if (n < 1 || r0.size() != n) {
    throw std::invalid_argument("initial infected/recovered vectors must have equal length");
  }
  for (const auto& segment : schedule.segments) {
    if (segment.params.nodes() != n) {
      throw std::invalid_argument("schedule network size does not match the initial state");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(i0[i]) || !std::isfinite(r0[i]) || i0[i] < 0.0 || r0[i] < 0.0 ||
        i0[i] + r0[i] > 1.0) {
      throw std::invalid_argument("initial node states must be nonnegative with I + R <= 1");
    }
  }

  std::mt19937_64 rng_proc = substream(seed, "process");
  std::mt19937_64 rng_obs = substream(seed, "observation");
  std::normal_distribution<double> gauss;

  Trajectory out;
  out.times.reserve(static_cast<std::size_t>(steps));
  out.states.reserve(static_cast<std::size_t>(steps) + 1);
  out.data.reserve(static_cast<std::size_t>(steps));
  out.noise_draws.reserve(static_cast<std::size_t>(steps));

  Vector infected = i0;
  Vector recovered = r0;
  Vector state(2 * n);
  state << infected, recovered;
  out.states.push_back(state);

  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const SirNetworkParams& params = schedule.at(t);
    const Matrix phi = sir_regressor(infected, recovered);
    const Vector drift = sir_drift(infected, recovered, params);

    const Vector xi =
        draw_process_noise(noise, phi, params.theta(), 2 * n, h, rng_proc, gauss);
    Vector next = state + h * drift + xi;

    bool clamped_step = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double inf = std::clamp(next[i], 0.0, 1.0);
      double rec = std::clamp(next[n + i], 0.0, 1.0);
      if (inf != next[i] || rec != next[n + i]) {
        clamped_step = true;
      }
      const double total = inf + rec;
      if (total > 1.0) {
        inf /= total;
        rec /= total;
        clamped_step = true;
      }
      next[i] = inf;
      next[n + i] = rec;
    }
    if (clamped_step) {
      ++out.clamp_events;
    }

    Vector psi = noise.targets == TargetKind::kDrift ? drift : ((next - state) / h).eval();
    add_observation_noise(noise, psi, rng_obs, gauss);

    out.times.push_back(t);
    out.noise_draws.push_back(xi);
    out.data.push_back(Datum{k, t, phi, psi});
    out.states.push_back(next);
    state = next;
    infected = state.head(n);
    recovered = state.tail(n);
  }
  return out;
}

void write_trajectory_csv(const Trajectory& trajectory,
                          const std::vector<std::string>& state_labels,
                          const std::vector<std::string>& target_labels,
                          const std::filesystem::path& path) {
  if (trajectory.data.size() != trajectory.times.size() ||
      trajectory.states.size() != trajectory.data.size() + 1) {
    throw std::invalid_argument("trajectory record is inconsistent");
  }
  if (!trajectory.data.empty() &&
      (static_cast<std::size_t>(trajectory.states.front().size()) != state_labels.size() ||
       static_cast<std::size_t>(trajectory.data.front().psi.size()) != target_labels.size())) {
    throw std::invalid_argument("label counts do not match trajectory dimensions");
  }

  CsvFile file(path);
  std::vector<std::string> row{"k", "t"};
  row.insert(row.end(), state_labels.begin(), state_labels.end());
  row.insert(row.end(), target_labels.begin(), target_labels.end());
  file.write_row(row);

  for (std::size_t k = 0; k < trajectory.data.size(); ++k) {
    row.clear();
    row.push_back(std::to_string(trajectory.data[k].k));
    row.push_back(format_double(trajectory.times[k]));
    const Vector& x = trajectory.states[k];
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      row.push_back(format_double(x[i]));
    }
    const Vector& psi = trajectory.data[k].psi;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      row.push_back(format_double(psi[i]));
    }
    file.write_row(row);
  }
  file.close();
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, std::size_t state_dim,
                               std::size_t target_dim) {
  const std::vector<std::vector<std::string>> rows = read_csv(path);
  if (rows.empty()) {
    throw std::runtime_error("trajectory file is empty: " + path.string());
  }
  const std::size_t want = 2 + state_dim + target_dim;
  Trajectory out;
  const auto parse = [&](const std::string& field) {
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0') {
      throw std::runtime_error("bad numeric field '" + field + "' in " + path.string());
    }
    return value;
  };
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != want) {
      throw std::runtime_error("row " + std::to_string(r) + " of " + path.string() +
                               " has " + std::to_string(row.size()) + " fields, expected " +
                               std::to_string(want));
    }
    Datum d;
    d.k = static_cast<std::int64_t>(parse(row[0]));
    d.t = parse(row[1]);
    Vector x(static_cast<Eigen::Index>(state_dim));
    for (std::size_t i = 0; i < state_dim; ++i) {
      x[static_cast<Eigen::Index>(i)] = parse(row[2 + i]);
    }
    d.psi.resize(static_cast<Eigen::Index>(target_dim));
    for (std::size_t i = 0; i < target_dim; ++i) {
      d.psi[static_cast<Eigen::Index>(i)] = parse(row[2 + state_dim + i]);
    }
    out.times.push_back(d.t);
    out.states.push_back(std::move(x));
    out.data.push_back(std::move(d));
  }
  return out;
}

}  // namespace excite
