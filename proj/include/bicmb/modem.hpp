#pragma once

// Bits-to-symbols mapping for the interleaved block.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "bicmb/constellation.hpp"
#include "bicmb/errors.hpp"
#include "bicmb/interleaver.hpp"

namespace bicmb {

// Groups each m transmit-ordered bits into one 16-QAM point; returns the
// S x K symbol matrix (stream s, time k).
inline Eigen::MatrixXcd map_symbols(const std::vector<std::uint8_t>& tx_bits,
                                    const InterleaverMap& map) {
  if (tx_bits.size() != map.block_bits())
    throw parameter_error("map_symbols: length != block_bits");
  const auto& qam = ConstellationMap::qam16();
  const int s_count = map.streams();
  const int m = map.bits_per_symbol();
  if (m != ConstellationMap::kBitsPerSymbol)
    throw parameter_error("map_symbols: bits per symbol must be 4");
  const std::size_t k_count = map.symbols_per_stream();
  Eigen::MatrixXcd x(s_count, k_count);
  for (std::size_t k = 0; k < k_count; ++k)
    for (int s = 0; s < s_count; ++s) {
      const std::size_t base = (k * s_count + s) * m;
      unsigned label = 0;
      for (int i = 0; i < m; ++i)
        label = (label << 1) | (tx_bits[base + i] & 1u);
      x(s, k) = qam.point(label);
    }
  return x;
}

}  // namespace bicmb
