#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "excite/sim.hpp"

namespace excite {

/// Raised for unreadable, unparseable, or schema-violating configuration
/// (the CLI maps it to exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DetectorConfig {
  double eta = 0.5;
  double tau = 0.1;
  std::int64_t min_samples = 0;
  bool reset_on_change = false;
  bool reset_theta = false;  ///< restore theta0 on reset (resetting pipelines)
};

struct EstimatorConfig {
  std::string kind = "gw-rls";  ///< "gw-rls" | "ef-rls" | "gradient"
  std::string label;            ///< output label; defaults to kind, "cp-" + kind when resetting
  double alpha = 0.98;
  double rho = 1e5;  ///< P0 = rho * I
  std::optional<std::vector<double>> theta0;  ///< default: all ones
  std::optional<std::int64_t> excitation_cap;
  bool resetting = false;  ///< wrap with change-point state resetting
  std::optional<DetectorConfig> detector;
};

struct SisSegmentConfig {
  double t = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Constant parameters or an explicit piecewise schedule (exactly one).
struct SisModelConfig {
  std::vector<SisSegmentConfig> schedule;  ///< always at least one segment after parsing
};

struct NetworkConfig {
  std::string topology = "fully-connected";  ///< | "star" | "erdos-renyi"
  double edge_prob = 0.5;
  double weight_min = 0.05;
  double weight_max = 0.5;
  double gamma_min = 0.1;
  double gamma_max = 0.4;
};

struct BScaleConfig {
  double t = 0.0;
  double scale = 1.0;  ///< B multiplier from time t on
};

struct SirModelConfig {
  Eigen::Index nodes = 7;
  std::optional<NetworkConfig> network;  ///< random network (drawn from the "network" substream)
  std::optional<std::vector<std::vector<double>>> b;  ///< explicit transmission matrix
  std::optional<std::vector<double>> gamma;           ///< explicit recovery rates
  std::vector<BScaleConfig> b_schedule;               ///< optional transmissibility switches
};

using ModelConfig = std::variant<SisModelConfig, SirModelConfig>;

struct SimConfig {
  double h = 0.1;
  std::int64_t steps = 1000;
  std::vector<double> i0 = {0.01};  ///< scalar broadcasts across nodes
  std::vector<double> r0 = {0.0};
  NoiseConfig noise;
};

struct AxisConfig {
  double min = 0.0;
  double max = 1.0;
  std::int64_t count = 2;
};

struct SurfaceConfig {
  AxisConfig beta;
  AxisConfig gamma;
};

struct RocConfig {
  std::int64_t trials = 100;
  std::int64_t window = 10;
  std::vector<std::int64_t> change_points;
  std::int64_t jitter = 5;      ///< per-trial uniform switch-time jitter, in samples
  double scale_low = 0.4;       ///< B alternates between 1.0 and this across switches
  std::vector<double> etas;
  std::vector<double> taus;
  std::int64_t min_samples = 10;
  std::optional<std::int64_t> excitation_cap;
};

struct MetricsConfig {
  double delta = 1e-2;
  std::optional<std::int64_t> pi_window;  ///< emit the sliding PI report when set
  std::optional<SurfaceConfig> surface;
  std::optional<RocConfig> roc;
};

struct OutputConfig {
  std::string dir = "out";
};

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  ModelConfig model;
  SimConfig sim;
  std::vector<EstimatorConfig> estimators;
  MetricsConfig metrics;
  OutputConfig output;
};

/// Semantic validation; throws ConfigError listing every violation found.
void validate_config(const ExperimentConfig& config);

/// Parses and validates a config document. Unknown keys are rejected so
/// typos fail loudly. Throws ConfigError.
ExperimentConfig config_from_json(const std::string& text);

/// Reads and parses a config file. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical serialization: fixed key order and shortest round-trip number
/// formatting, so serialize(parse(serialize(c))) is byte-identical.
std::string config_to_json(const ExperimentConfig& config);

/// FNV-1a 64-bit hash of the canonical serialization, as fixed-width hex.
std::string config_hash_hex(const ExperimentConfig& config);

/// Built-in experiment presets. Throws ConfigError for unknown names.
ExperimentConfig preset(const std::string& name);

/// Preset names with one-line descriptions, in listing order.
const std::vector<std::pair<std::string, std::string>>& preset_catalog();

}  // namespace excite
