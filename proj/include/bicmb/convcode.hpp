#pragma once

// Rate-1/2 constraint-length-7 convolutional code, generators 133/171
// (octal), with zero-tail termination, plus the matching soft-input Viterbi
// decoder over externally supplied bit metrics.
//
// Register convention: the newest bit occupies the MSB of the 7-bit window,
// so the encoder's impulse response on each output equals the MSB-first
// binary expansion of the generator. A trellis state holds the previous six
// input bits (newest at bit 5); the input bit of step t is bit 5 of the
// state entered at t+1.

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "bicmb/bit_metrics.hpp"
#include "bicmb/errors.hpp"
#include "bicmb/interleaver.hpp"

namespace bicmb {

struct CodeSpec {
  static constexpr int kRateNum = 1;
  static constexpr int kRateDen = 2;
  static constexpr int kConstraintLength = 7;
  static constexpr int kMemory = 6;
  static constexpr int kStates = 64;
  static constexpr unsigned kGen0 = 0133;  // 0b1011011
  static constexpr unsigned kGen1 = 0171;  // 0b1111001
  static constexpr int kFreeDistance = 10;
  static constexpr int kTailBits = kMemory;
};

namespace detail {

inline int parity7(unsigned x) {
  x ^= x >> 4;
  x ^= x >> 2;
  x ^= x >> 1;
  return static_cast<int>(x & 1u);
}

inline int out0(unsigned reg) { return parity7(reg & CodeSpec::kGen0); }
inline int out1(unsigned reg) { return parity7(reg & CodeSpec::kGen1); }

}  // namespace detail

// Zero-tail-terminated encoding: 2 * (info + 6) coded bits, generator-133
// output first at every step.
inline std::vector<std::uint8_t> conv_encode(const std::vector<std::uint8_t>& info) {
  std::vector<std::uint8_t> coded;
  coded.reserve(2 * (info.size() + CodeSpec::kTailBits));
  unsigned state = 0;
  auto push = [&](unsigned bit) {
    unsigned reg = (bit << CodeSpec::kMemory) | state;
    coded.push_back(static_cast<std::uint8_t>(detail::out0(reg)));
    coded.push_back(static_cast<std::uint8_t>(detail::out1(reg)));
    state = reg >> 1;
  };
  for (std::uint8_t b : info) push(b & 1u);
  for (int i = 0; i < CodeSpec::kTailBits; ++i) push(0);
  return coded;
}

// Minimum Hamming weight over all diverge/remerge trellis paths, found by
// relaxing shortest merge-back weights to a fixpoint over the 64 states.
inline int free_distance() {
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  std::array<int, CodeSpec::kStates> merge{};
  merge.fill(kInf);
  merge[0] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (unsigned s = 1; s < CodeSpec::kStates; ++s) {
      for (unsigned u = 0; u < 2; ++u) {
        unsigned reg = (u << CodeSpec::kMemory) | s;
        int w = detail::out0(reg) + detail::out1(reg);
        int cand = w + merge[reg >> 1];
        if (cand < merge[s]) {
          merge[s] = cand;
          changed = true;
        }
      }
    }
  }
  unsigned diverge = (1u << CodeSpec::kMemory);  // input 1 from the zero state
  int w0 = detail::out0(diverge) + detail::out1(diverge);
  return w0 + merge[diverge >> 1];
}

// Soft-input Viterbi decoding of a zero-terminated block. The metric for
// coded bit k' under hypothesis b is looked up through the interleaver map.
// Add-compare-select keeps the lowest (state, input) label on ties.
inline std::vector<std::uint8_t> viterbi_decode(const BitMetricTable& metrics,
                                                const InterleaverMap& map) {
  if (metrics.block_bits() != map.block_bits() ||
      metrics.streams() != map.streams() ||
      metrics.bits_per_symbol() != map.bits_per_symbol())
    throw parameter_error("viterbi_decode: metric/interleaver mismatch");
  const std::size_t coded = map.coded_bits();
  if (coded % 2 != 0 || coded / 2 < static_cast<std::size_t>(CodeSpec::kTailBits))
    throw parameter_error("viterbi_decode: bad coded length");
  const std::size_t n_steps = coded / 2;
  const std::size_t info_len = n_steps - CodeSpec::kTailBits;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::array<double, CodeSpec::kStates> pm;
  std::array<double, CodeSpec::kStates> pm_next;
  pm.fill(kInf);
  pm[0] = 0.0;
  std::vector<std::uint8_t> pred(n_steps * CodeSpec::kStates, 0);

  for (std::size_t t = 0; t < n_steps; ++t) {
    auto p0 = map.target(2 * t);
    auto p1 = map.target(2 * t + 1);
    const double m0[2] = {metrics.at(p0.time, p0.stream, p0.bit, 0),
                          metrics.at(p0.time, p0.stream, p0.bit, 1)};
    const double m1[2] = {metrics.at(p1.time, p1.stream, p1.bit, 0),
                          metrics.at(p1.time, p1.stream, p1.bit, 1)};
    pm_next.fill(kInf);
    const unsigned u_max = (t < info_len) ? 2u : 1u;  // tail forces zeros
    std::uint8_t* pr = pred.data() + t * CodeSpec::kStates;
    for (unsigned s = 0; s < CodeSpec::kStates; ++s) {
      if (pm[s] == kInf) continue;
      for (unsigned u = 0; u < u_max; ++u) {
        unsigned reg = (u << CodeSpec::kMemory) | s;
        double cand = pm[s] + m0[detail::out0(reg)] + m1[detail::out1(reg)];
        unsigned nxt = reg >> 1;
        if (cand < pm_next[nxt]) {
          pm_next[nxt] = cand;
          pr[nxt] = static_cast<std::uint8_t>(s);
        }
      }
    }
    pm = pm_next;
  }

  std::vector<std::uint8_t> info(info_len);
  unsigned state = 0;  // termination pins the final state
  for (std::size_t t = n_steps; t-- > 0;) {
    unsigned prev = pred[t * CodeSpec::kStates + state];
    if (t < info_len)
      info[t] = static_cast<std::uint8_t>((state >> (CodeSpec::kMemory - 1)) & 1u);
    state = prev;
  }
  return info;
}

}  // namespace bicmb
