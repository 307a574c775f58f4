#pragma once

#include <cstdint>
#include <limits>

namespace mclt {

/// Purpose tag folded into a stream key so that, for one replication, the
/// path innovations and the completion fill-in signs never share bits.
enum class Lane : std::uint32_t {
  Path = 0,
  Completion = 1,
  Pilot = 2,
};

/// Identifies one independent random stream: (master seed, replication index).
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  Lane lane = Lane::Path;

  StreamKey with_lane(Lane l) const { return {seed, index, l}; }
  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Counter-based stream. The k-th output (k = 0, 1, ...) is
///
///   mix64(base + (k + 1) * 0x9E3779B97F4A7C15)
///
/// where base = mix64(mix64(seed ^ lane_salt) + index * 0xD1B54A32D192ED03).
/// Output k depends only on (key, k), so replications can be generated in any
/// order and on any thread with bit-identical results.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(const StreamKey& key) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(base_ + counter_ * kGolden);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Fair sign, +1 or -1.
  int sign() noexcept { return ((*this)() >> 63) != 0 ? 1 : -1; }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace mclt
