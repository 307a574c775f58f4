#include "mclt/rng.hpp"

namespace mclt {

namespace {
constexpr std::uint64_t kLaneSalt[] = {
    0x243F6A8885A308D3ULL,
    0x13198A2E03707344ULL,
    0xA4093822299F31D0ULL,
};
constexpr std::uint64_t kIndexStride = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Stream::Stream(const StreamKey& key) noexcept
    : base_(mix64(mix64(key.seed ^ kLaneSalt[static_cast<std::uint32_t>(key.lane) % 3]) +
                  key.index * kIndexStride)) {}

}  // namespace mclt
