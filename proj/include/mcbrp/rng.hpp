#ifndef MCBRP_RNG_HPP_
#define MCBRP_RNG_HPP_

#include <cstdint>
#include <random>

namespace mcbrp {

// Purpose tags keep the streams of different consumers apart even when they
// share a base seed and instance id.
enum class StreamPurpose : std::uint32_t {
  kSynthetic = 1,
  kSurrogate = 2,
  kSimulation = 3,
  kTest = 99,
};

// Returns an engine whose sequence depends only on (seed, purpose, instance,
// feature). Results computed from such streams are independent of worker
// count and of the order in which instances are processed.
inline std::mt19937_64 MakeStream(std::uint64_t seed, StreamPurpose purpose,
                                  std::uint64_t instance = 0,
                                  std::uint64_t feature = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose),
                    static_cast<std::uint32_t>(instance),
                    static_cast<std::uint32_t>(instance >> 32),
                    static_cast<std::uint32_t>(feature),
                    static_cast<std::uint32_t>(feature >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace mcbrp

#endif  // MCBRP_RNG_HPP_
