#pragma once

// Per-(time, stream, bit-position, bit-value) branch metrics consumed by the
// soft-input Viterbi decoder. Flat row-major storage:
// index = ((k*S + s)*m + i)*2 + b.

#include <cmath>
#include <cstddef>
#include <vector>

#include "bicmb/errors.hpp"

namespace bicmb {

class BitMetricTable {
 public:
  BitMetricTable() = default;
  BitMetricTable(std::size_t symbols, int streams, int bits_per_symbol)
      : symbols_(symbols), streams_(streams), m_(bits_per_symbol),
        gamma_(symbols * streams * bits_per_symbol * 2, 0.0) {
    if (symbols == 0 || streams < 1 || bits_per_symbol < 1)
      throw parameter_error("BitMetricTable: bad dimensions");
  }

  std::size_t symbols() const { return symbols_; }
  int streams() const { return streams_; }
  int bits_per_symbol() const { return m_; }
  std::size_t block_bits() const { return gamma_.size() / 2; }

  double& at(std::size_t k, int s, int i, int b) {
    return gamma_[index(k, s, i, b)];
  }
  double at(std::size_t k, int s, int i, int b) const {
    return gamma_[index(k, s, i, b)];
  }

  const std::vector<double>& data() const { return gamma_; }
  std::vector<double>& data() { return gamma_; }

  bool all_finite_nonneg() const {
    for (double g : gamma_)
      if (!std::isfinite(g) || g < 0.0) return false;
    return true;
  }

 private:
  std::size_t index(std::size_t k, int s, int i, int b) const {
    return (((k * streams_) + s) * m_ + i) * 2 + b;
  }

  std::size_t symbols_ = 0;
  int streams_ = 0;
  int m_ = 0;
  std::vector<double> gamma_;
};

}  // namespace bicmb
