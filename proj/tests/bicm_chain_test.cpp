#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "bicmb/constellation.hpp"
#include "bicmb/convcode.hpp"
#include "bicmb/interleaver.hpp"
#include "bicmb/modem.hpp"
#include "bicmb/rng.hpp"
#include "test_util.hpp"

using namespace bicmb;

namespace {

std::vector<std::uint8_t> random_bits(std::size_t n, CounterRng& rng) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_bit());
  return bits;
}

// Metrics that are 0 for the transmitted coded bit and 1 otherwise.
BitMetricTable oracle_metrics(const std::vector<std::uint8_t>& coded,
                              const InterleaverMap& map) {
  BitMetricTable g(map.symbols_per_stream(), map.streams(), map.bits_per_symbol());
  for (auto& v : g.data()) v = 1.0;
  for (std::size_t k = 0; k < coded.size(); ++k) {
    auto p = map.target(k);
    g.at(p.time, p.stream, p.bit, coded[k] & 1) = 0.0;
  }
  return g;
}

BitMetricTable random_metrics(const InterleaverMap& map, CounterRng& rng) {
  BitMetricTable g(map.symbols_per_stream(), map.streams(), map.bits_per_symbol());
  for (auto& v : g.data()) v = rng.next_unit();
  return g;
}

// Exhaustive maximum-likelihood decoding for short blocks: encodes every
// candidate information word and sums its metrics through the map.
std::pair<std::vector<std::uint8_t>, double> exhaustive_ml(
    const BitMetricTable& g, const InterleaverMap& map, std::size_t info_len) {
  double best_cost = std::numeric_limits<double>::infinity();
  std::uint64_t best_word = 0;
  std::vector<std::uint8_t> info(info_len);
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << info_len); ++word) {
    for (std::size_t i = 0; i < info_len; ++i) info[i] = (word >> i) & 1;
    std::vector<std::uint8_t> coded = conv_encode(info);
    double cost = 0.0;
    for (std::size_t k = 0; k < coded.size(); ++k) {
      auto p = map.target(k);
      cost += g.at(p.time, p.stream, p.bit, coded[k] & 1);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_word = word;
    }
  }
  for (std::size_t i = 0; i < info_len; ++i) info[i] = (best_word >> i) & 1;
  return {info, best_cost};
}

double viterbi_cost(const std::vector<std::uint8_t>& info, const BitMetricTable& g,
                    const InterleaverMap& map) {
  std::vector<std::uint8_t> coded = conv_encode(info);
  double cost = 0.0;
  for (std::size_t k = 0; k < coded.size(); ++k) {
    auto p = map.target(k);
    cost += g.at(p.time, p.stream, p.bit, coded[k] & 1);
  }
  return cost;
}

}  // namespace

TEST(ConvEncode, AllZeroInput) {
  std::vector<std::uint8_t> coded = conv_encode(std::vector<std::uint8_t>(20, 0));
  EXPECT_EQ(coded.size(), 2u * 26u);
  for (auto b : coded) EXPECT_EQ(b, 0);
}

TEST(ConvEncode, ImpulseResponseMatchesGenerators) {
  std::vector<std::uint8_t> info(10, 0);
  info[0] = 1;
  std::vector<std::uint8_t> coded = conv_encode(info);
  // MSB-first expansions of the octal generators, built independently here.
  auto bits_of = [](unsigned octal) {
    std::vector<int> out;
    for (int i = 6; i >= 0; --i) out.push_back((octal >> i) & 1);
    return out;
  };
  std::vector<int> g0 = bits_of(0133);
  std::vector<int> g1 = bits_of(0171);
  for (std::size_t t = 0; t < 16; ++t) {
    int want0 = t < g0.size() ? g0[t] : 0;
    int want1 = t < g1.size() ? g1[t] : 0;
    EXPECT_EQ(coded[2 * t], want0) << "t=" << t;
    EXPECT_EQ(coded[2 * t + 1], want1) << "t=" << t;
  }
}

TEST(ConvEncode, Linearity) {
  CounterRng rng(derive_stream(401, 0));
  std::vector<std::uint8_t> u = random_bits(64, rng);
  std::vector<std::uint8_t> v = random_bits(64, rng);
  std::vector<std::uint8_t> w(64);
  for (int i = 0; i < 64; ++i) w[i] = u[i] ^ v[i];
  std::vector<std::uint8_t> cu = conv_encode(u), cv = conv_encode(v),
                            cw = conv_encode(w);
  for (std::size_t i = 0; i < cw.size(); ++i) EXPECT_EQ(cw[i], cu[i] ^ cv[i]);
}

TEST(FreeDistance, TrellisSearchGivesTen) {
  EXPECT_EQ(free_distance(), CodeSpec::kFreeDistance);
}

TEST(FreeDistance, BoundedEnumerationCrossCheck) {
  // Every nonzero terminated codeword of up to 12 information bits must have
  // weight >= 10, and some must attain it.
  int min_weight = std::numeric_limits<int>::max();
  std::vector<std::uint8_t> info(12);
  for (std::uint32_t word = 1; word < (1u << 12); ++word) {
    for (int i = 0; i < 12; ++i) info[i] = (word >> i) & 1;
    std::vector<std::uint8_t> coded = conv_encode(info);
    int weight = std::accumulate(coded.begin(), coded.end(), 0);
    min_weight = std::min(min_weight, weight);
  }
  EXPECT_EQ(min_weight, 10);
}

TEST(Interleaver, BijectionAndStreamAlternation) {
  InterleaverMap map = InterleaverMap::create(2, 1036);
  EXPECT_EQ(map.block_bits(), 1040u);
  EXPECT_EQ(map.symbols_per_stream(), 130u);

  std::vector<std::uint32_t> seen(map.block_bits(), 0);
  for (std::size_t k = 0; k < map.block_bits(); ++k) seen[map.tx_index(k)]++;
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(),
                          [](std::uint32_t c) { return c == 1; }));

  for (std::size_t k = 0; k + 1 < map.block_bits(); ++k)
    EXPECT_NE(map.target(k).stream, map.target(k + 1).stream);
  for (std::size_t k = 0; k < map.block_bits(); ++k)
    EXPECT_EQ(map.target(k).stream, static_cast<int>(k % 2));
}

TEST(Interleaver, RoundTripIdentity) {
  CounterRng rng(derive_stream(402, 0));
  for (int streams : {1, 2, 3}) {
    InterleaverMap map = InterleaverMap::create(streams, 600);
    std::vector<double> data(map.block_bits());
    for (auto& d : data) d = rng.next_unit();
    EXPECT_EQ(map.deinterleave(map.interleave(data)), data);
  }
}

TEST(Interleaver, NeighborBitsLandDepthSymbolsApart) {
  InterleaverMap map = InterleaverMap::create(2, 1036, 8);
  // Within a stream, consecutive coded bits should be separated by about
  // depth symbols in time.
  auto a = map.target(0);
  auto b = map.target(2);  // next coded bit on stream 0
  EXPECT_EQ(a.stream, b.stream);
  long gap = std::labs(static_cast<long>(a.time) - static_cast<long>(b.time));
  EXPECT_GE(gap, 7);
  EXPECT_LE(gap, 9);
}

TEST(Interleaver, LengthChecked) {
  InterleaverMap map = InterleaverMap::create(2, 100);
  std::vector<double> wrong(map.block_bits() + 1);
  EXPECT_THROW(map.interleave(wrong), parameter_error);
  EXPECT_THROW(zero_pad(std::vector<std::uint8_t>(200, 0), 100), parameter_error);
}

TEST(Constellation, UnitEnergyAndGrayNeighbors) {
  const auto& qam = ConstellationMap::qam16();
  double energy = 0.0;
  for (unsigned label = 0; label < 16; ++label) energy += std::norm(qam.point(label));
  EXPECT_NEAR(energy / 16.0, 1.0, 1e-12);

  EXPECT_LT(std::abs(qam.point(0) - Cplx(-3.0, -3.0) / std::sqrt(10.0)), 1e-12);

  // All 24 nearest-neighbor pairs on the 4 x 4 lattice differ in one bit.
  const double step = 2.0 / std::sqrt(10.0);
  int neighbor_pairs = 0;
  for (unsigned a = 0; a < 16; ++a)
    for (unsigned b = a + 1; b < 16; ++b) {
      if (std::abs(std::abs(qam.point(a) - qam.point(b)) - step) < 1e-9) {
        ++neighbor_pairs;
        int diff_bits = __builtin_popcount(a ^ b);
        EXPECT_EQ(diff_bits, 1) << "labels " << a << "," << b;
      }
    }
  EXPECT_EQ(neighbor_pairs, 24);
}

TEST(Constellation, SubsetsBalanced) {
  const auto& qam = ConstellationMap::qam16();
  for (int i = 0; i < 4; ++i)
    for (int b = 0; b < 2; ++b) EXPECT_EQ(qam.subset(i, b).size(), 8u);
  EXPECT_THROW(qam.subset(4, 0), parameter_error);
}

TEST(MapSymbols, ZeroBitsAndMeanEnergy) {
  InterleaverMap map = InterleaverMap::create(2, 1036);
  std::vector<std::uint8_t> zeros(map.block_bits(), 0);
  Eigen::MatrixXcd x = map_symbols(zeros, map);
  EXPECT_EQ(x.rows(), 2);
  EXPECT_EQ(x.cols(), 130);
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      EXPECT_LT(std::abs(x(r, c) - Cplx(-3.0, -3.0) / std::sqrt(10.0)), 1e-12);

  CounterRng rng(derive_stream(403, 0));
  double acc = 0.0;
  std::size_t n_sym = 0;
  for (int rep = 0; rep < 20; ++rep) {  // ~10^4 random symbols
    std::vector<std::uint8_t> bits(map.block_bits());
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_bit());
    Eigen::MatrixXcd m = map_symbols(bits, map);
    acc += m.squaredNorm();
    n_sym += m.size();
  }
  EXPECT_NEAR(acc / n_sym, 1.0, 0.05);
}

TEST(Viterbi, OracleMetricsRecoverAnySequence) {
  CounterRng rng(derive_stream(404, 0));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> info = random_bits(512, rng);
    std::vector<std::uint8_t> coded = conv_encode(info);
    InterleaverMap map = InterleaverMap::create(2, coded.size());
    std::vector<std::uint8_t> padded = zero_pad(coded, map.block_bits());
    EXPECT_EQ(viterbi_decode(oracle_metrics(padded, map), map), info);
  }
}

TEST(Viterbi, AllZeroFavoringMetricsGiveZeros) {
  InterleaverMap map = InterleaverMap::create(2, 2 * (100 + 6));
  std::vector<std::uint8_t> zeros(map.block_bits(), 0);
  std::vector<std::uint8_t> decoded = viterbi_decode(oracle_metrics(zeros, map), map);
  EXPECT_EQ(decoded.size(), 100u);
  for (auto b : decoded) EXPECT_EQ(b, 0);
}

TEST(Viterbi, MatchesExhaustiveMlOnShortBlocks) {
  CounterRng rng(derive_stream(405, 0));
  const std::size_t info_len = 12;
  InterleaverMap map = InterleaverMap::create(2, 2 * (info_len + 6));
  for (int trial = 0; trial < 30; ++trial) {
    BitMetricTable g = random_metrics(map, rng);
    auto [ml_info, ml_cost] = exhaustive_ml(g, map, info_len);
    std::vector<std::uint8_t> vit = viterbi_decode(g, map);
    EXPECT_EQ(vit, ml_info);
    EXPECT_NEAR(viterbi_cost(vit, g, map), ml_cost, 1e-9);
  }
}

TEST(Viterbi, DimensionMismatchRejected) {
  InterleaverMap map = InterleaverMap::create(2, 2 * 106);
  BitMetricTable wrong(10, 2, 4);
  EXPECT_THROW(viterbi_decode(wrong, map), parameter_error);
}
