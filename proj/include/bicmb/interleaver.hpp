#pragma once

// Spatial bit interleaver pi : k' -> (k, s, i).
//
// Coded bit k' goes to stream s = k' mod S (so consecutive coded bits always
// hit different streams for S >= 2), and within each stream through a pruned
// row-column block interleaver with depth * m rows, which lands neighboring
// in-stream bits about `depth` symbols apart. The map is a bijection on
// [0, block_bits); block_bits is coded_bits rounded up to a multiple of S*m,
// with the tail positions carrying zero filler bits.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bicmb/errors.hpp"

namespace bicmb {

class InterleaverMap {
 public:
  struct Position {
    std::size_t time;  // k
    int stream;        // s
    int bit;           // i
  };

  static InterleaverMap create(int streams, std::size_t coded_bits, int depth = 8,
                               int bits_per_symbol = 4) {
    if (streams < 1 || depth < 1 || bits_per_symbol < 1)
      throw parameter_error("InterleaverMap: bad parameters");
    if (coded_bits == 0) throw parameter_error("InterleaverMap: empty block");

    InterleaverMap map;
    map.streams_ = streams;
    map.m_ = bits_per_symbol;
    map.depth_ = depth;
    map.coded_bits_ = coded_bits;
    const std::size_t group = static_cast<std::size_t>(streams) * bits_per_symbol;
    map.block_bits_ = ((coded_bits + group - 1) / group) * group;

    const std::size_t per_stream = map.block_bits_ / streams;
    const std::size_t rows = static_cast<std::size_t>(depth) * bits_per_symbol;
    const std::size_t cols = (per_stream + rows - 1) / rows;

    // Pruned row-column permutation: write row-major, read column-major.
    std::vector<std::uint32_t> perm(per_stream);
    std::uint32_t out = 0;
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t r = 0; r < rows; ++r) {
        std::size_t j = r * cols + c;
        if (j < per_stream) perm[j] = out++;
      }

    map.forward_.resize(map.block_bits_);
    map.inverse_.resize(map.block_bits_);
    for (std::size_t k = 0; k < map.block_bits_; ++k) {
      const int s = static_cast<int>(k % streams);
      const std::size_t j = perm[k / streams];
      const std::size_t time = j / bits_per_symbol;
      const int bit = static_cast<int>(j % bits_per_symbol);
      const std::size_t p =
          (time * streams + s) * bits_per_symbol + static_cast<std::size_t>(bit);
      map.forward_[k] = static_cast<std::uint32_t>(p);
      map.inverse_[p] = static_cast<std::uint32_t>(k);
    }
    return map;
  }

  int streams() const { return streams_; }
  int bits_per_symbol() const { return m_; }
  int depth() const { return depth_; }
  std::size_t coded_bits() const { return coded_bits_; }
  std::size_t block_bits() const { return block_bits_; }
  std::size_t symbols_per_stream() const {
    return block_bits_ / (static_cast<std::size_t>(streams_) * m_);
  }

  Position target(std::size_t k) const {
    std::size_t p = forward_[k];
    std::size_t sym = p / m_;
    return {sym / streams_, static_cast<int>(sym % streams_),
            static_cast<int>(p % m_)};
  }

  std::size_t tx_index(std::size_t k) const { return forward_[k]; }

  template <typename T>
  std::vector<T> interleave(const std::vector<T>& in) const {
    if (in.size() != block_bits_)
      throw parameter_error("interleave: length != block_bits");
    std::vector<T> out(block_bits_);
    for (std::size_t k = 0; k < block_bits_; ++k) out[forward_[k]] = in[k];
    return out;
  }

  template <typename T>
  std::vector<T> deinterleave(const std::vector<T>& in) const {
    if (in.size() != block_bits_)
      throw parameter_error("deinterleave: length != block_bits");
    std::vector<T> out(block_bits_);
    for (std::size_t p = 0; p < block_bits_; ++p) out[inverse_[p]] = in[p];
    return out;
  }

 private:
  int streams_ = 0;
  int m_ = 0;
  int depth_ = 0;
  std::size_t coded_bits_ = 0;
  std::size_t block_bits_ = 0;
  std::vector<std::uint32_t> forward_;  // k' -> (k*S + s)*m + i
  std::vector<std::uint32_t> inverse_;
};

// Zero filler up to the interleaver block length.
inline std::vector<std::uint8_t> zero_pad(std::vector<std::uint8_t> bits,
                                          std::size_t block_bits) {
  if (bits.size() > block_bits) throw parameter_error("zero_pad: block too small");
  bits.resize(block_bits, 0);
  return bits;
}

}  // namespace bicmb
