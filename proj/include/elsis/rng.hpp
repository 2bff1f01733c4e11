#pragma once

#include <cstdint>

namespace elsis {

// SplitMix64 output function (Steele, Lea & Flood; constants from the
// reference implementation).  Fixed across platforms.
inline std::uint64_t split_mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Key for replication stream `index` of a base seed.  Keys are scattered by
// the mixer so streams do not overlap as shifted copies of each other.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = split_mix64(seed + 0x9E3779B97F4A7C15ull);
  const std::uint64_t b = split_mix64(index * 0xBF58476D1CE4E5B9ull + 0x94D049BB133111EBull);
  return split_mix64(a ^ b);
}

// Inverse standard-normal CDF, Acklam's rational approximation
// (absolute error below 5e-9; self-contained so the draw sequence is
// identical wherever IEEE doubles are).
double normal_icdf(double p);

// Counter-based generator: output i is split_mix64(key + i * golden gamma).
// Pure function of (key, counter), cheap to fork by key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() {
    counter_ += 1;
    return split_mix64(key_ + counter_ * 0x9E3779B97F4A7C15ull);
  }

  // Uniform on the open interval (0,1): 53-bit mantissa, offset by half a ulp.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() { return normal_icdf(next_uniform()); }

  // Student t with 4 degrees of freedom: normal over sqrt(chi^2_4 / 4),
  // the chi-square built from four further normal draws.
  double next_t4();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace elsis
