#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace gnblab {

/// splitmix64 finalizer; also used to derive stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// xoshiro256** generator addressed by (seed, stream). Two states with the
/// same pair produce identical sequences; distinct streams are seeded through
/// independent splitmix64 chains, which is how parallel work is fanned out.
class RandomState {
 public:
  using result_type = std::uint64_t;

  explicit RandomState(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {
    std::uint64_t x = seed ^ splitmix64(stream * 0xd1b54a32d192ed03ULL + 1);
    for (auto& word : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      word = splitmix64(x);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Child state for sub-stream `index`; depends only on (seed, stream, index).
  RandomState split(std::uint64_t index) const noexcept {
    return RandomState(seed_, splitmix64(stream_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_;
  std::uint64_t stream_;
};

inline double standard_exponential(RandomState& rng) {
  return -std::log(rng.uniform());
}

/// Marsaglia polar method; the second variate of each pair is discarded so
/// that a draw depends only on the generator state.
inline double standard_normal(RandomState& rng) {
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

/// Standard Laplace, density e^{-|x|}/2.
inline double standard_laplace(RandomState& rng) {
  const double e = standard_exponential(rng);
  return rng.uniform() < 0.5 ? -e : e;
}

}  // namespace gnblab
