#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace excite {

/// Expands one root seed into independent named substreams ("process",
/// "observation", "network", "schedule", ...), so that toggling one noise
/// source never shifts the draws of another. Streams for repeated trials are
/// derived by folding a trial index into the root seed first.
std::mt19937_64 substream(std::uint64_t root_seed, std::string_view name);

/// Derives a per-trial root seed from a run seed, for repeated experiments.
std::uint64_t fold_seed(std::uint64_t root_seed, std::uint64_t index);

}  // namespace excite
