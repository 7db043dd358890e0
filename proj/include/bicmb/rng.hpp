#pragma once

// Counter-based random streams built on the SplitMix64 mix function.
// Every stream is keyed by (seed, indices), so draws are independent of
// scheduling and identical across platforms and worker counts.

#include <cmath>
#include <complex>
#include <cstdint>

namespace bicmb {

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Steele, Lea, Flood / Stafford mix13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives a stream key from a master seed and up to three stream indices.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                      std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed + kGolden64);
  h = mix64(h ^ (a + kGolden64));
  h = mix64(h ^ (b + kGolden64));
  h = mix64(h ^ (c + kGolden64));
  return h;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += kGolden64);
    return mix64(z);
  }

  // Uniform in (0, 1]; never zero, safe under log().
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  int next_bit() { return static_cast<int>(next_u64() >> 63); }

  // Uniform integer in [0, n); multiply-shift, bias < 2^-64.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard real normal via Box-Muller (cosine branch).
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Circularly symmetric complex normal, unit variance per complex entry.
  std::complex<double> next_cgaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-std::log(u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace bicmb
