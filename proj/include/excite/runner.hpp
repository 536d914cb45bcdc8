#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "excite/config.hpp"

namespace excite {

struct RunResult {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  ///< file names written, in emission order
  nlohmann::ordered_json metrics;  ///< the metrics.json payload
};

/// Resolves the output directory: explicit override > EXCITE_ID_OUT
/// environment variable > config.output.dir.
std::filesystem::path resolve_out_dir(const ExperimentConfig& config,
                                      const std::filesystem::path& override_dir);

/// Runs one experiment end to end: simulate, identify, detect, evaluate, and
/// write the output bundle (trajectory/estimate/detection CSVs, optional PI,
/// surface and ROC reports, metrics.json, manifest.json). Deterministic for
/// a fixed config: re-running yields byte-identical files.
RunResult run_experiment(const ExperimentConfig& config,
                         const std::filesystem::path& out_dir_override = {});

}  // namespace excite
