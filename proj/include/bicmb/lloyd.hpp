#pragma once

// Generalized Lloyd training of beamforming codebooks under the
// phase-optimal (sc-oe) distortion.
//
// Each iteration partitions the training set by nearest codeword, then
// recomputes every region's codeword as follows: per column, take the
// principal eigenvector of the region's conditional correlation matrix
// (numerical average of v_s v_s^H), assemble the columns, and project the
// result onto the closest orthonormal-column matrix. The update is accepted
// only if it does not increase the region's distortion sum, so the recorded
// average-distortion history is non-increasing. Regions that empty are
// reseeded with the currently worst-quantized training item.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "bicmb/codebook.hpp"
#include "bicmb/errors.hpp"
#include "bicmb/linalg.hpp"
#include "bicmb/quantizer.hpp"
#include "bicmb/rng.hpp"

namespace bicmb {

struct TrainingSet {
  std::vector<Eigen::MatrixXcd> items;  // N x S, orthonormal columns each
  std::uint64_t source_seed = 0;

  std::size_t count() const { return items.size(); }
};

struct LloydReport {
  // Entry 0 is the initial codebook's average distortion; entry m the
  // average distortion after update m. Non-increasing throughout.
  std::vector<double> distortion_history;
  int iterations = 0;
  bool converged = false;
  double epsilon = 0.0;
};

namespace detail {

inline Eigen::MatrixXcd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                        CounterRng& rng) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.next_cgaussian();
  return m;
}

// Dominant eigenvector of a Hermitian PSD matrix by power iteration.
// Deterministic start e_1; falls back to the next basis vector whenever the
// current start is annihilated by the matrix. The returned vector has unit
// norm and its largest-magnitude entry real and nonnegative.
inline Eigen::VectorXcd principal_eigenvector(const Eigen::MatrixXcd& r) {
  const Eigen::Index n = r.rows();
  const double scale = r.norm();
  Eigen::VectorXcd x;
  for (Eigen::Index start = 0; start < n; ++start) {
    x = Eigen::VectorXcd::Zero(n);
    x[start] = 1.0;
    Eigen::VectorXcd rx = r * x;
    if (rx.norm() > 1e-14 * std::max(scale, 1e-300)) break;
    if (start + 1 == n)
      throw rank_error("principal_eigenvector: zero matrix");
  }
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXcd rx = r * x;
    double nrm = rx.norm();
    if (nrm <= 0.0) break;
    x = rx / nrm;
    lambda = std::real(x.dot(r * x));
    if ((r * x - lambda * x).norm() <= 1e-10 * std::max(lambda, 1e-300)) break;
  }
  // Same phase convention as the SVD columns.
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = std::abs(x[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best > 0.0) x *= std::conj(x[imax]) / best;
  return x;
}

}  // namespace detail

// 2^B codewords, each the closest-unitary projection of an i.i.d. complex
// Gaussian N x S draw. Deterministic for a fixed seed.
inline Codebook random_codebook(int n_tx, int n_streams, int bits,
                                std::uint64_t seed) {
  if (n_tx < 1 || n_streams < 1 || n_streams > n_tx || bits < 1 || bits > 30)
    throw parameter_error("random_codebook: bad dimensions");
  std::vector<Eigen::MatrixXcd> entries;
  entries.reserve(std::size_t{1} << bits);
  for (std::size_t i = 0; i < (std::size_t{1} << bits); ++i) {
    // A rank-deficient Gaussian draw has probability zero; redraw on the
    // next sub-stream if it ever happens.
    for (std::uint64_t attempt = 0;; ++attempt) {
      CounterRng rng(derive_stream(seed, i, attempt));
      Eigen::MatrixXcd g = detail::gaussian_matrix(n_tx, n_streams, rng);
      try {
        entries.push_back(closest_unitary(g));
        break;
      } catch (const rank_error&) {
        if (attempt > 16) throw;
      }
    }
  }
  return Codebook::create(n_tx, n_streams, bits, std::move(entries));
}

// Right singular matrices (leading S columns) of i.i.d. CN(0,1) channels.
inline TrainingSet training_set(std::size_t count, int n_rx, int n_tx, int n_streams,
                                std::uint64_t seed) {
  if (count < 1 || n_rx < 1 || n_tx < 1 || n_streams < 1 ||
      n_streams > std::min(n_rx, n_tx))
    throw parameter_error("training_set: bad dimensions");
  TrainingSet ts;
  ts.source_seed = seed;
  ts.items.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(derive_stream(seed, i));
    Eigen::MatrixXcd h = detail::gaussian_matrix(n_rx, n_tx, rng);
    ts.items.push_back(truncate(svd_ordered(h), n_streams).v);
  }
  return ts;
}

// Nearest-codeword regions under the sc-oe distortion (lowest-index ties).
inline std::vector<std::vector<std::size_t>> partition(const TrainingSet& ts,
                                                       const Codebook& cb) {
  std::vector<std::vector<std::size_t>> regions(cb.size());
  for (std::size_t n = 0; n < ts.items.size(); ++n) {
    if (ts.items[n].rows() != cb.n_tx() || ts.items[n].cols() != cb.n_streams())
      throw parameter_error("partition: item/codebook shape mismatch");
    regions[select_sc_oe(ts.items[n], cb).index].push_back(n);
  }
  return regions;
}

// (1/|region|) * sum of v_s v_s^H over the region; Hermitian PSD, unit trace.
inline Eigen::MatrixXcd conditional_correlation(
    const std::vector<Eigen::MatrixXcd>& region_items, int column) {
  if (region_items.empty())
    throw empty_region_error("conditional_correlation: empty region");
  const Eigen::Index n = region_items.front().rows();
  if (column < 0 || column >= region_items.front().cols())
    throw parameter_error("conditional_correlation: column out of range");
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& v : region_items) {
    if (v.rows() != n)
      throw parameter_error("conditional_correlation: ragged region");
    r.noalias() += v.col(column) * v.col(column).adjoint();
  }
  return r / static_cast<double>(region_items.size());
}

// Region codeword: per-column principal eigenvectors of the conditional
// correlations, projected onto the closest orthonormal-column matrix.
inline Codeword centroid(const std::vector<Eigen::MatrixXcd>& region_items) {
  if (region_items.empty()) throw empty_region_error("centroid: empty region");
  const Eigen::Index n = region_items.front().rows();
  const Eigen::Index s = region_items.front().cols();
  Eigen::MatrixXcd e(n, s);
  for (Eigen::Index c = 0; c < s; ++c)
    e.col(c) = detail::principal_eigenvector(
        conditional_correlation(region_items, static_cast<int>(c)));
  return Codeword{closest_unitary(e)};
}

// Mean sc-oe selection distortion of the items against the codebook.
inline double average_distortion(const Codebook& cb,
                                 const std::vector<Eigen::MatrixXcd>& items) {
  if (items.empty()) throw parameter_error("average_distortion: no items");
  double acc = 0.0;
  for (const auto& v : items) acc += select_sc_oe(v, cb).distortion;
  return acc / static_cast<double>(items.size());
}

// Alternating partition / centroid updates until the relative improvement of
// the average distortion drops to epsilon or max_iter is reached.
inline std::pair<Codebook, LloydReport> lloyd_train(const TrainingSet& ts, int bits,
                                                    double epsilon, int max_iter,
                                                    std::uint64_t seed) {
  if (bits < 1 || bits > 24) throw parameter_error("lloyd_train: bad bit count");
  const std::size_t n_entries = std::size_t{1} << bits;
  if (ts.count() < 10 * n_entries)
    throw parameter_error("lloyd_train: training set smaller than 10 * 2^B");
  if (!(epsilon > 0.0)) throw parameter_error("lloyd_train: epsilon must be > 0");
  if (max_iter < 1) throw parameter_error("lloyd_train: max_iter must be >= 1");

  const int n_tx = static_cast<int>(ts.items.front().rows());
  const int n_streams = static_cast<int>(ts.items.front().cols());
  std::vector<Eigen::MatrixXcd> code =
      random_codebook(n_tx, n_streams, bits, seed).entries();

  const std::size_t count = ts.count();
  std::vector<std::size_t> assign(count);
  std::vector<double> dist(count);

  auto reselect = [&]() {
    double acc = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < code.size(); ++k) {
        double d = distortion_sc_oe(ts.items[n], code[k]);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      assign[n] = best;
      dist[n] = best_d;
      acc += best_d;
    }
    return acc / static_cast<double>(count);
  };

  LloydReport report;
  report.epsilon = epsilon;
  report.distortion_history.push_back(reselect());

  for (int m = 1; m <= max_iter; ++m) {
    std::vector<std::vector<std::size_t>> regions(n_entries);
    for (std::size_t n = 0; n < count; ++n) regions[assign[n]].push_back(n);

    // Reseed empty regions with the worst-quantized items, one item each.
    std::vector<char> taken(count, 0);
    for (std::size_t k = 0; k < n_entries; ++k) {
      if (!regions[k].empty()) continue;
      std::size_t worst = count;
      double worst_d = -1.0;
      for (std::size_t n = 0; n < count; ++n) {
        if (taken[n]) continue;
        if (dist[n] > worst_d) {
          worst_d = dist[n];
          worst = n;
        }
      }
      if (worst == count)
        throw degenerate_error("lloyd_train: no items left to reseed with");
      taken[worst] = 1;
      code[k] = ts.items[worst];
    }

    // Centroid update, kept only when it does not worsen the region.
    std::vector<Eigen::MatrixXcd> region_items;
    for (std::size_t k = 0; k < n_entries; ++k) {
      if (regions[k].empty()) continue;
      region_items.clear();
      region_items.reserve(regions[k].size());
      for (std::size_t n : regions[k]) region_items.push_back(ts.items[n]);
      Eigen::MatrixXcd cand = centroid(region_items).matrix;
      double old_sum = 0.0, new_sum = 0.0;
      for (const auto& v : region_items) {
        old_sum += distortion_sc_oe(v, code[k]);
        new_sum += distortion_sc_oe(v, cand);
      }
      if (new_sum <= old_sum) code[k] = std::move(cand);
    }

    double j_prev = report.distortion_history.back();
    double j_now = reselect();
    report.distortion_history.push_back(j_now);
    report.iterations = m;
    // A distortion at the floating-point floor is a global minimum; the
    // relative-improvement rule would otherwise spend one more pass on it.
    if (j_now <= 1e-12 || j_prev <= 0.0 ||
        (j_prev - j_now) / j_prev <= epsilon) {
      report.converged = true;
      break;
    }
  }
  return {Codebook::create(n_tx, n_streams, bits, std::move(code)),
          std::move(report)};
}

}  // namespace bicmb
