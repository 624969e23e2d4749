#pragma once

// Seeded random number generation with a fully specified algorithm so that
// identical seeds reproduce identical streams on every platform.
//
// Generator: xoshiro256++ (Blackman & Vigna), state initialized by running
// splitmix64 from the seed. Normal variates use the Box-Muller transform;
// both outputs of each pair are consumed, in draw order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace coalition {

// splitmix64 step: advances x and returns the next output.
inline std::uint64_t splitmix64_next(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngState {
 public:
  explicit RngState(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64_next(x);
  }

  // Derives an independent stream: the index is folded into the seed before
  // the splitmix64 expansion. Used for per-tree and per-instance streams.
  static RngState stream(std::uint64_t seed, std::uint64_t index) {
    return RngState(seed ^ index);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Integer in [0, bound) by fixed-point scaling of one 64-bit draw.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Standard normal via Box-Muller. The first draw of a pair consumes two
  // uniforms and caches the second output for the next call.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

  std::vector<double> normal_vector(std::size_t count, double mean, double sd) {
    std::vector<double> out(count);
    for (auto& v : out) v = next_normal(mean, sd);
    return out;
  }

  std::vector<double> uniform_vector(std::size_t count) {
    std::vector<double> out(count);
    for (auto& v : out) v = next_double();
    return out;
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Fisher-Yates shuffle driven by the supplied stream.
template <typename T>
void shuffle(std::vector<T>& items, RngState& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace coalition
