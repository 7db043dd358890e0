#pragma once

// Beamforming codebooks: 2^B precoder matrices with orthonormal columns.

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "bicmb/errors.hpp"
#include "bicmb/linalg.hpp"

namespace bicmb {

// Orthonormality defect allowed for codewords held in memory.
inline constexpr double kCodewordTol = 1e-8;

struct Codeword {
  Eigen::MatrixXcd matrix;  // N x S, orthonormal columns
};

class Codebook {
 public:
  // Validates every invariant: entry count 2^bits, shapes N x S, finite
  // entries, orthonormal columns within kCodewordTol.
  static Codebook create(int n_tx, int n_streams, int bits,
                         std::vector<Eigen::MatrixXcd> entries) {
    if (n_tx < 1 || n_streams < 1 || n_streams > n_tx)
      throw parameter_error("Codebook: need 1 <= n_streams <= n_tx");
    if (bits < 1 || bits > 30)
      throw parameter_error("Codebook: bits out of range");
    const std::size_t want = std::size_t{1} << bits;
    if (entries.size() != want)
      throw parameter_error("Codebook: entry count != 2^bits");
    for (const auto& e : entries) {
      if (e.rows() != n_tx || e.cols() != n_streams)
        throw parameter_error("Codebook: entry shape mismatch");
      if (!e.allFinite())
        throw parameter_error("Codebook: non-finite entry");
      if (orthonormality_defect(e) > kCodewordTol)
        throw parameter_error("Codebook: entry columns not orthonormal");
    }
    Codebook cb;
    cb.n_tx_ = n_tx;
    cb.n_streams_ = n_streams;
    cb.bits_ = bits;
    cb.entries_ = std::move(entries);
    return cb;
  }

  int n_tx() const { return n_tx_; }
  int n_streams() const { return n_streams_; }
  int bits() const { return bits_; }
  std::size_t size() const { return entries_.size(); }
  const Eigen::MatrixXcd& entry(std::size_t i) const { return entries_[i]; }
  const std::vector<Eigen::MatrixXcd>& entries() const { return entries_; }

 private:
  int n_tx_ = 0;
  int n_streams_ = 0;
  int bits_ = 0;
  std::vector<Eigen::MatrixXcd> entries_;
};

}  // namespace bicmb
