#pragma once

// Monte-Carlo link-level engine: channel generation, precoder selection,
// transmission, detection, decoding, and BER/FER accumulation over SNR
// sweeps.
//
// Randomness is counter-based: every block derives its channel, data, and
// noise streams from (master_seed, snr_index, block_index, substream), so
// results are independent of worker count and identical across runs. Two
// configurations differing only in receiver or selection therefore see the
// same channels, bits, and noise per block, which lets comparisons run on
// paired randomness. Blocks are processed in fixed batches of 64 and the
// stopping rule is evaluated at batch boundaries only, keeping the set of
// simulated blocks deterministic; the info-bit cap is honored exactly by
// trimming the final batch.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bicmb/codebook.hpp"
#include "bicmb/convcode.hpp"
#include "bicmb/errors.hpp"
#include "bicmb/interleaver.hpp"
#include "bicmb/linalg.hpp"
#include "bicmb/modem.hpp"
#include "bicmb/quantizer.hpp"
#include "bicmb/receivers.hpp"
#include "bicmb/rng.hpp"

namespace bicmb {

enum class Selection { kPerfect, kScE, kScOe, kLambdaMin, kFixedRotation };
enum class Receiver { kZf, kMmse, kSvd, kPerfect };

// A point stops once info_bits >= max_info_bits, or when every configured
// minimum (info bits, block errors, bit errors) has been met.
struct StoppingRule {
  std::uint64_t min_block_errors = 200;
  std::uint64_t min_bit_errors = 0;
  std::uint64_t min_info_bits = 0;
  std::uint64_t max_info_bits = 20'000'000;
};

struct SimConfig {
  int n_rx = 2;
  int n_tx = 2;
  int streams = 2;
  Selection selection = Selection::kPerfect;
  Receiver receiver = Receiver::kPerfect;
  std::optional<Codebook> codebook;           // sc-e / sc-oe / lambda-min
  std::optional<Eigen::MatrixXcd> rotation;   // fixed-rotation mode
  std::vector<double> snr_db;
  int info_bits_per_block = 512;
  int interleaver_depth = 8;
  StoppingRule stop;
  std::uint64_t master_seed = 1;
  int workers = 1;

  // Provenance for the effective-config banner; not used by the engine.
  std::string codebook_path;
  std::optional<std::uint64_t> rvq_seed;
  int rvq_bits = 0;
  std::string rotation_name;

  void validate() const {
    if (n_rx < 1 || n_tx < 1) throw parameter_error("SimConfig: bad antenna counts");
    if (streams < 1 || streams > std::min(n_rx, n_tx))
      throw parameter_error("SimConfig: need 1 <= streams <= min(n_rx, n_tx)");
    bool needs_codebook = selection == Selection::kScE ||
                          selection == Selection::kScOe ||
                          selection == Selection::kLambdaMin;
    if (needs_codebook) {
      if (!codebook) throw parameter_error("SimConfig: selection needs a codebook");
      if (codebook->n_tx() != n_tx || codebook->n_streams() != streams)
        throw parameter_error("SimConfig: codebook dimensions mismatch");
    }
    if (selection == Selection::kFixedRotation) {
      if (!rotation) throw parameter_error("SimConfig: fixed-rotation needs Q");
      if (rotation->rows() != streams || rotation->cols() != streams)
        throw parameter_error("SimConfig: rotation must be S x S");
    }
    if (receiver == Receiver::kPerfect && selection != Selection::kPerfect)
      throw parameter_error("SimConfig: perfect receiver requires perfect selection");
    if (snr_db.empty()) throw parameter_error("SimConfig: empty SNR grid");
    for (std::size_t i = 1; i < snr_db.size(); ++i)
      if (!(snr_db[i] > snr_db[i - 1]))
        throw parameter_error("SimConfig: SNR grid must be strictly increasing");
    if (info_bits_per_block < 1 || interleaver_depth < 1)
      throw parameter_error("SimConfig: bad block parameters");
    if (stop.max_info_bits == 0)
      throw parameter_error("SimConfig: max_info_bits must be positive");
    if (workers < 1) throw parameter_error("SimConfig: workers must be >= 1");
  }
};

struct BerPoint {
  double snr_db = 0.0;
  std::uint64_t info_bits = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t block_errors = 0;
  std::uint64_t blocks = 0;
  std::uint64_t discarded_blocks = 0;
  double ber = 0.0;
  double fer = 0.0;
};

struct BlockResult {
  std::uint64_t bit_errors = 0;
  bool block_error = false;
  std::uint32_t discarded = 0;
};

struct BlockDetail {
  Eigen::MatrixXcd channel;
  Eigen::MatrixXcd precoder;
  PhaseVector phases;
  double selection_distortion = 0.0;
  std::vector<std::uint8_t> info_bits;
  std::vector<std::uint8_t> decoded_bits;
  BitMetricTable metrics;
  std::uint32_t redraws = 0;
};

// The unitary 2x2 DFT used by the fixed-rotation mode.
inline Eigen::MatrixXcd dft2() {
  Eigen::MatrixXcd q(2, 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  q << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
  return q;
}

// i.i.d. CN(0,1) entries: real and imaginary parts N(0, 1/2).
inline Eigen::MatrixXcd draw_channel(int n_rx, int n_tx, CounterRng& rng) {
  if (n_rx < 1 || n_tx < 1) throw parameter_error("draw_channel: bad dimensions");
  Eigen::MatrixXcd h(n_rx, n_tx);
  for (Eigen::Index r = 0; r < n_rx; ++r)
    for (Eigen::Index c = 0; c < n_tx; ++c) h(r, c) = rng.next_cgaussian();
  return h;
}

namespace detail {

// Substream ids inside one (snr, block, attempt) cell.
enum SubStream : std::uint64_t { kChannelStream = 0, kDataStream = 1, kNoiseStream = 2 };

inline CounterRng block_stream(const SimConfig& cfg, std::uint64_t snr_index,
                               std::uint64_t block_index, std::uint64_t attempt,
                               SubStream sub) {
  return CounterRng(derive_stream(cfg.master_seed, snr_index,
                                  block_index, attempt * 8 + sub));
}

}  // namespace detail

// One fading block end to end. Rank failures of the effective channel are
// redrawn on a fresh sub-stream and counted.
inline BlockDetail run_block_detail(const SimConfig& cfg, double snr_db,
                                    std::uint64_t snr_index,
                                    std::uint64_t block_index) {
  const int s_count = cfg.streams;
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  const double sigma2 = static_cast<double>(cfg.n_tx) / snr_lin;
  const auto map = InterleaverMap::create(
      s_count, 2 * (static_cast<std::size_t>(cfg.info_bits_per_block) +
                    CodeSpec::kTailBits),
      cfg.interleaver_depth);
  const std::size_t k_count = map.symbols_per_stream();

  for (std::uint32_t attempt = 0; attempt < 64; ++attempt) {
    auto ch_rng = detail::block_stream(cfg, snr_index, block_index, attempt,
                                       detail::kChannelStream);
    auto data_rng = detail::block_stream(cfg, snr_index, block_index, attempt,
                                         detail::kDataStream);
    auto noise_rng = detail::block_stream(cfg, snr_index, block_index, attempt,
                                          detail::kNoiseStream);

    BlockDetail out;
    out.redraws = attempt;
    out.channel = draw_channel(cfg.n_rx, cfg.n_tx, ch_rng);
    SvdTriple t = svd_ordered(out.channel);
    TruncatedSvd tr = truncate(t, s_count);

    out.selection_distortion = std::numeric_limits<double>::quiet_NaN();
    switch (cfg.selection) {
      case Selection::kPerfect:
        out.precoder = tr.v;
        out.phases = PhaseVector::zeros(s_count);
        break;
      case Selection::kFixedRotation:
        out.precoder = tr.v * *cfg.rotation;
        out.phases = PhaseVector::zeros(s_count);
        break;
      case Selection::kScE: {
        SelectionResult r = select_sc_e(tr.v, *cfg.codebook);
        out.precoder = cfg.codebook->entry(r.index);
        out.phases = r.phases;
        out.selection_distortion = r.distortion;
        break;
      }
      case Selection::kScOe: {
        SelectionResult r = select_sc_oe(tr.v, *cfg.codebook);
        out.precoder = cfg.codebook->entry(r.index);
        out.phases = r.phases;
        out.selection_distortion = r.distortion;
        break;
      }
      case Selection::kLambdaMin: {
        SelectionResult r = select_lambda_min(out.channel, *cfg.codebook);
        out.precoder = cfg.codebook->entry(r.index);
        out.phases = r.phases;
        out.selection_distortion = r.distortion;
        break;
      }
    }
    // The SVD receiver needs the phase alignment even when the selection
    // criterion did not produce one.
    if (cfg.receiver == Receiver::kSvd && cfg.selection != Selection::kScOe)
      out.phases = optimal_phases(tr.v, out.precoder);

    out.info_bits.resize(cfg.info_bits_per_block);
    for (auto& b : out.info_bits) b = static_cast<std::uint8_t>(data_rng.next_bit());
    auto tx_bits = map.interleave(zero_pad(conv_encode(out.info_bits),
                                           map.block_bits()));
    Eigen::MatrixXcd x = map_symbols(tx_bits, map);

    Eigen::MatrixXcd y = out.channel * out.precoder * x;
    const double noise_scale = std::sqrt(sigma2);
    for (std::size_t k = 0; k < k_count; ++k)
      for (int m = 0; m < cfg.n_rx; ++m)
        y(m, k) += noise_scale * noise_rng.next_cgaussian();

    try {
      switch (cfg.receiver) {
        case Receiver::kZf:
          out.metrics = zf_metrics(zf_equalize(out.channel, out.precoder, y));
          break;
        case Receiver::kMmse:
          out.metrics =
              mmse_metrics(mmse_equalize(out.channel, out.precoder, sigma2, y));
          break;
        case Receiver::kSvd: {
          EqualizedBlock eq = svd_receiver_equalize(t, out.phases, y);
          SvdReceiverParams p =
              svd_receiver_params(t, s_count, out.precoder, out.phases, sigma2);
          eq.lambda_tilde = p.lambda_tilde;
          eq.sigma_tilde_sq = p.sigma_tilde_sq;
          out.metrics = svd_receiver_metrics(eq);
          break;
        }
        case Receiver::kPerfect:
          out.metrics = perfect_csit_metrics(t, s_count, y);
          break;
      }
    } catch (const rank_error&) {
      continue;  // discard the block and redraw
    }
    out.decoded_bits = viterbi_decode(out.metrics, map);
    return out;
  }
  throw degenerate_error("run_block_detail: persistent rank failures");
}

inline BlockResult run_block(const SimConfig& cfg, double snr_db,
                             std::uint64_t snr_index, std::uint64_t block_index) {
  BlockDetail d = run_block_detail(cfg, snr_db, snr_index, block_index);
  BlockResult r;
  r.discarded = d.redraws;
  for (std::size_t i = 0; i < d.info_bits.size(); ++i)
    if (d.info_bits[i] != d.decoded_bits[i]) ++r.bit_errors;
  r.block_error = r.bit_errors > 0;
  return r;
}

namespace detail {

inline std::uint64_t snr_index_of(const SimConfig& cfg, double snr_db) {
  for (std::size_t i = 0; i < cfg.snr_db.size(); ++i)
    if (cfg.snr_db[i] == snr_db) return i;
  return 0;
}

}  // namespace detail

// Convenience forms deriving the RNG's SNR index from the config grid.
inline BlockDetail run_block_detail(const SimConfig& cfg, double snr_db,
                                    std::uint64_t block_index) {
  return run_block_detail(cfg, snr_db, detail::snr_index_of(cfg, snr_db),
                          block_index);
}

inline BlockResult run_block(const SimConfig& cfg, double snr_db,
                             std::uint64_t block_index) {
  return run_block(cfg, snr_db, detail::snr_index_of(cfg, snr_db), block_index);
}

inline std::vector<BerPoint> run_sweep(const SimConfig& cfg) {
  cfg.validate();
  constexpr std::size_t kBatch = 64;
  const std::uint64_t per_block = cfg.info_bits_per_block;
  std::vector<BerPoint> points;
  points.reserve(cfg.snr_db.size());

  for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
    const double snr = cfg.snr_db[si];
    BerPoint acc;
    acc.snr_db = snr;
    std::uint64_t next_block = 0;
    std::vector<BlockResult> results;

    auto done = [&]() {
      if (acc.info_bits >= cfg.stop.max_info_bits) return true;
      return acc.info_bits >= cfg.stop.min_info_bits &&
             acc.block_errors >= cfg.stop.min_block_errors &&
             acc.bit_errors >= cfg.stop.min_bit_errors;
    };

    while (!done()) {
      std::uint64_t cap_left =
          (cfg.stop.max_info_bits - acc.info_bits + per_block - 1) / per_block;
      std::size_t batch =
          static_cast<std::size_t>(std::min<std::uint64_t>(kBatch, cap_left));
      if (batch == 0) break;
      results.assign(batch, BlockResult{});

      const std::size_t workers =
          std::min(static_cast<std::size_t>(cfg.workers), batch);
      if (workers > 1) {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
          pool.emplace_back([&, w]() {
            for (std::size_t b = w; b < batch; b += workers)
              results[b] = run_block(cfg, snr, si, next_block + b);
          });
        for (auto& th : pool) th.join();
      } else {
        for (std::size_t b = 0; b < batch; ++b)
          results[b] = run_block(cfg, snr, si, next_block + b);
      }

      for (const BlockResult& r : results) {  // ordered reduction
        acc.bit_errors += r.bit_errors;
        acc.block_errors += r.block_error ? 1 : 0;
        acc.discarded_blocks += r.discarded;
        acc.info_bits += per_block;
        acc.blocks += 1;
      }
      next_block += batch;
    }

    acc.ber = acc.info_bits ? static_cast<double>(acc.bit_errors) / acc.info_bits : 0.0;
    acc.fer = acc.blocks ? static_cast<double>(acc.block_errors) / acc.blocks : 0.0;
    points.push_back(acc);
  }
  return points;
}

// Results CSV, one row per point; leading '#' lines carry provenance.
inline void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points,
                          const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << "\n";
  os << "snr_db,info_bits,bit_errors,blocks,block_errors,ber,fer,discarded_blocks\n";
  char line[256];
  for (const auto& p : points) {
    std::snprintf(line, sizeof(line), "%g,%llu,%llu,%llu,%llu,%.8e,%.8e,%llu\n",
                  p.snr_db, static_cast<unsigned long long>(p.info_bits),
                  static_cast<unsigned long long>(p.bit_errors),
                  static_cast<unsigned long long>(p.blocks),
                  static_cast<unsigned long long>(p.block_errors), p.ber, p.fer,
                  static_cast<unsigned long long>(p.discarded_blocks));
    os << line;
  }
}

// SNR (dB) at which the curve crosses the target BER, by log-linear
// interpolation between the first straddling pair of qualifying points
// (>= qualify block errors, positive BER). NaN when there is no crossing.
inline double snr_at_ber(const std::vector<BerPoint>& points, double target,
                         std::uint64_t qualify = 200) {
  std::vector<const BerPoint*> q;
  for (const auto& p : points)
    if (p.block_errors >= qualify && p.ber > 0.0) q.push_back(&p);
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    double b0 = q[i]->ber, b1 = q[i + 1]->ber;
    if (b0 >= target && target >= b1) {
      if (b0 == b1) return q[i]->snr_db;
      double f = (std::log10(target) - std::log10(b0)) /
                 (std::log10(b1) - std::log10(b0));
      return q[i]->snr_db + f * (q[i + 1]->snr_db - q[i]->snr_db);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace bicmb
