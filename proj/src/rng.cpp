#include "excite/rng.hpp"

namespace excite {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::mt19937_64 substream(std::uint64_t root_seed, std::string_view name) {
  std::uint64_t state = root_seed ^ fnv1a(name);
  // A short splitmix64 run whitens the combined seed before it reaches the
  // engine, so nearby root seeds / similar names give unrelated streams.
  const std::uint32_t words[8] = {
      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
  std::seed_seq seq(words, words + 8);
  return std::mt19937_64(seq);
}

std::uint64_t fold_seed(std::uint64_t root_seed, std::uint64_t index) {
  std::uint64_t state = root_seed ^ (0xA24BAED4963EE407ull * (index + 1));
  return splitmix64(state);
}

}  // namespace excite
