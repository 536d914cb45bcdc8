#include <cstdint>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "excite/config.hpp"
#include "excite/runner.hpp"

namespace {

void report(const excite::RunResult& result) {
  std::printf("wrote %zu files to %s\n", result.files.size(),
              result.out_dir.string().c_str());
  for (const std::string& name : result.files) {
    std::printf("  %s\n", name.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online parameter identification under weak excitation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::uint64_t seed = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("config", config_path, "Path to the JSON config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides EXCITE_ID_OUT)");

  CLI::App* preset_cmd = app.add_subcommand("preset", "Run a built-in preset");
  preset_cmd->add_option("name", preset_name, "Preset name (see list-presets)")->required();
  CLI::Option* seed_opt = preset_cmd->add_option("--seed", seed, "Root seed override");
  preset_cmd->add_option("--out", out_dir, "Output directory (overrides EXCITE_ID_OUT)");

  app.add_subcommand("list-presets", "List the built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      const excite::ExperimentConfig config = excite::load_config(config_path);
      report(excite::run_experiment(config, out_dir));
    } else if (preset_cmd->parsed()) {
      excite::ExperimentConfig config = excite::preset(preset_name);
      if (seed_opt->count() > 0) {
        config.seed = seed;
      }
      report(excite::run_experiment(config, out_dir));
    } else {
      for (const auto& [name, description] : excite::preset_catalog()) {
        std::printf("%-18s %s\n", name.c_str(), description.c_str());
      }
    }
  } catch (const excite::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
