#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "excite/epimodels.hpp"
#include "excite/types.hpp"

namespace excite {

enum class ProcessNoise {
  kNone,
  kAdditive,     ///< xi = sigma * sqrt(h) * z, z standard normal
  kStateScaled,  ///< xi = scale * signed_sqrt(phi(x) diag(theta)) b, b ~ N(0, h I)
};

enum class TargetKind {
  kFiniteDifference,  ///< psi_k = (x_{k+1} - x_k) / h from realized states
  kDrift,             ///< psi_k = drift(x_k), the h -> 0 limit, known exactly
};

struct NoiseConfig {
  ProcessNoise process = ProcessNoise::kNone;
  double sigma = 0.0;        ///< additive kind only
  double scale = 1.0;        ///< state-scaled kind multiplier (1 = verbatim map)
  double obs_rel_std = 0.0;  ///< observation noise nu_i ~ N(0, (obs_rel_std |psi_i|)^2)
  TargetKind targets = TargetKind::kFiniteDifference;
};

/// Euler-Maruyama simulation record. states holds x_0 .. x_K (one more than
/// data); data[k] carries the regressor at x_k and the target psi_k.
struct Trajectory {
  std::vector<double> times;         ///< t_k for k = 0..K-1
  std::vector<Vector> states;        ///< x_0 .. x_K
  std::vector<Datum> data;           ///< K observations
  std::vector<Vector> noise_draws;   ///< realized process noise xi_k, k = 0..K-1
  std::int64_t clamp_events = 0;     ///< steps on which the state was clamped
};

/// Simulates SIS prevalence: x_{k+1} = x_k + h * drift + xi, clamped to
/// [0, 1]. Targets per NoiseConfig::targets; observation noise applied on
/// top. Noise comes from the "process" / "observation" substreams of seed.
/// Throws std::invalid_argument on invalid inputs (h <= 0, steps < 1,
/// i0 outside [0, 1], negative noise magnitudes, invalid schedule).
Trajectory simulate_sis(const Schedule<SisParams>& schedule, double i0, double h,
                        std::int64_t steps, const NoiseConfig& noise,
                        std::uint64_t seed);

/// Simulates the networked SIR model; states are [I; R] per node, clamped to
/// [0, 1] and shrunk proportionally when I + R exceeds 1 at a node.
Trajectory simulate_sir(const Schedule<SirNetworkParams>& schedule, const Vector& i0,
                        const Vector& r0, double h, std::int64_t steps,
                        const NoiseConfig& noise, std::uint64_t seed);

/// The identification stream of a trajectory.
inline const std::vector<Datum>& stream(const Trajectory& trajectory) {
  return trajectory.data;
}

/// Writes k, t, state components, target components as CSV (17 significant
/// digits, so a read-back is bit-exact). state_labels/target_labels name the
/// columns, e.g. {"I"} / {"psi"} for SIS.
void write_trajectory_csv(const Trajectory& trajectory,
                          const std::vector<std::string>& state_labels,
                          const std::vector<std::string>& target_labels,
                          const std::filesystem::path& path);

/// Reads back a trajectory CSV written by write_trajectory_csv. Only times,
/// states (x_0..x_{K-1}) and data are reconstructed; regressors are not
/// stored in the file and come back empty. Throws std::runtime_error on a
/// malformed file.
Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               std::size_t state_dim, std::size_t target_dim);

}  // namespace excite
