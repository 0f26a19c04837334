#pragma once

#include <cstdint>
#include <limits>

namespace psdb {

struct Seed {
  std::uint64_t value = 0;
  friend bool operator==(Seed, Seed) = default;
};

namespace detail {
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// SplitMix64. A substream is keyed by (seed, stream id) so that trial i of a
// Monte Carlo run draws the same numbers regardless of which worker runs it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(Seed seed) noexcept : state_(detail::splitmix64_mix(seed.value)) {}
  Rng(Seed seed, std::uint64_t stream) noexcept
      : state_(detail::splitmix64_mix(detail::splitmix64_mix(seed.value) ^
                                      detail::splitmix64_mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

}  // namespace psdb
