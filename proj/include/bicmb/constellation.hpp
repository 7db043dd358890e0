#pragma once

// Gray-labeled 16-QAM with unit average energy.
//
// A symbol label is four bits (b0 b1 b2 b3), b0 first in transmit order.
// (b0 b1) select the in-phase level through the Gray sequence
// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (scaled by 1/sqrt(10)); (b2 b3)
// select the quadrature level the same way. chi(i, b) is the subset of the
// 8 points whose label bit at position i equals b.

#include <array>
#include <complex>
#include <vector>

#include "bicmb/errors.hpp"

namespace bicmb {

class ConstellationMap {
 public:
  static constexpr int kBitsPerSymbol = 4;
  static constexpr int kPoints = 16;

  static const ConstellationMap& qam16() {
    static const ConstellationMap inst;
    return inst;
  }

  std::complex<double> point(unsigned label) const { return points_[label & 15u]; }

  // chi_b^i: all points whose label has value b at bit position i.
  const std::vector<std::complex<double>>& subset(int i, int b) const {
    if (i < 0 || i >= kBitsPerSymbol || b < 0 || b > 1)
      throw parameter_error("ConstellationMap::subset: bad position");
    return subsets_[i][b];
  }

  static unsigned label_of(int b0, int b1, int b2, int b3) {
    return static_cast<unsigned>((b0 << 3) | (b1 << 2) | (b2 << 1) | b3);
  }

  static int bit_of(unsigned label, int i) { return (label >> (3 - i)) & 1; }

 private:
  ConstellationMap() {
    const double scale = 1.0 / std::sqrt(10.0);
    auto gray_level = [](int hi, int lo) {
      // 00, 01, 11, 10 -> -3, -1, +1, +3
      if (hi == 0 && lo == 0) return -3.0;
      if (hi == 0 && lo == 1) return -1.0;
      if (hi == 1 && lo == 1) return 1.0;
      return 3.0;
    };
    for (unsigned label = 0; label < kPoints; ++label) {
      int b0 = bit_of(label, 0), b1 = bit_of(label, 1);
      int b2 = bit_of(label, 2), b3 = bit_of(label, 3);
      points_[label] = {scale * gray_level(b0, b1), scale * gray_level(b2, b3)};
    }
    for (int i = 0; i < kBitsPerSymbol; ++i)
      for (int b = 0; b < 2; ++b) {
        subsets_[i][b].reserve(kPoints / 2);
        for (unsigned label = 0; label < kPoints; ++label)
          if (bit_of(label, i) == b) subsets_[i][b].push_back(points_[label]);
      }
  }

  std::array<std::complex<double>, kPoints> points_;
  std::array<std::array<std::vector<std::complex<double>>, 2>, kBitsPerSymbol>
      subsets_;
};

}  // namespace bicmb
