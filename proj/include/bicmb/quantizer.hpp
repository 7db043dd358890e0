#pragma once

// Codeword-selection criteria for limited-rate precoder feedback.
//
// The right singular matrix of a channel is only determined up to a diagonal
// unitary factor, so a plain Euclidean match against the codebook (sc-e) can
// miss codewords that are rotations of the ideal precoder. The phase-optimal
// criterion (sc-oe) first aligns each column with the closed-form optimal
// phase, which makes the distortion invariant under that factor:
//
//   d_oe(V, Vhat) = 2S - 2 sum_s |vhat_s^H v_s|
//                 = min over diagonal unitary D of ||V D - Vhat||_F^2.
//
// A third criterion keeps the codeword maximizing the smallest singular
// value of H * Vhat (the lambda-min baseline).

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstddef>
#include <limits>

#include "bicmb/codebook.hpp"
#include "bicmb/errors.hpp"
#include "bicmb/linalg.hpp"

namespace bicmb {

struct SelectionResult {
  std::size_t index = 0;    // winning codebook entry
  PhaseVector phases;       // per-column alignment (all zero for sc-e/lambda-min)
  double distortion = 0.0;  // criterion value; lambda-min stores the negated
                            // minimum singular value so smaller stays better
};

// Per-column phases aligning V to Vhat: theta_k = -arg(vhat_k^H v_k),
// wrapped to [0, 2*pi). A zero inner product yields theta_k = 0.
inline PhaseVector optimal_phases(const Eigen::MatrixXcd& v,
                                  const Eigen::MatrixXcd& vhat) {
  if (v.rows() != vhat.rows() || v.cols() != vhat.cols())
    throw parameter_error("optimal_phases: shape mismatch");
  Eigen::ArrayXd theta(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    Cplx ip = vhat.col(k).dot(v.col(k));  // vhat_k^H v_k
    theta[k] = (std::abs(ip) > 0.0) ? -std::arg(ip) : 0.0;
  }
  return PhaseVector(theta);
}

// Plain squared Frobenius distance, no phase correction.
inline double distortion_sc_e(const Eigen::MatrixXcd& v,
                              const Eigen::MatrixXcd& vhat) {
  return frob_dist_sq(v, vhat);
}

// Phase-optimal Euclidean distortion, evaluated in closed form.
inline double distortion_sc_oe(const Eigen::MatrixXcd& v,
                               const Eigen::MatrixXcd& vhat) {
  if (v.rows() != vhat.rows() || v.cols() != vhat.cols())
    throw parameter_error("distortion_sc_oe: shape mismatch");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < v.cols(); ++k)
    acc += std::abs(vhat.col(k).dot(v.col(k)));
  double d = 2.0 * static_cast<double>(v.cols()) - 2.0 * acc;
  return d > 0.0 ? d : 0.0;
}

namespace detail {

inline void check_against(const Eigen::MatrixXcd& v, const Codebook& cb,
                          const char* who) {
  if (v.rows() != cb.n_tx() || v.cols() != cb.n_streams())
    throw parameter_error(std::string(who) + ": shape mismatch with codebook");
}

}  // namespace detail

// Arg-min of the phase-optimal distortion; ties break to the lowest index.
inline SelectionResult select_sc_oe(const Eigen::MatrixXcd& v, const Codebook& cb) {
  detail::check_against(v, cb, "select_sc_oe");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cb.size(); ++i) {
    double d = distortion_sc_oe(v, cb.entry(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return {best, optimal_phases(v, cb.entry(best)), best_d};
}

// Arg-min of the plain Euclidean distortion; phases reported as all-zero.
inline SelectionResult select_sc_e(const Eigen::MatrixXcd& v, const Codebook& cb) {
  detail::check_against(v, cb, "select_sc_e");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cb.size(); ++i) {
    double d = distortion_sc_e(v, cb.entry(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return {best, PhaseVector::zeros(v.cols()), best_d};
}

// Keeps the codeword maximizing the smallest singular value of H * Vhat_i.
// Scores within 1e-9 relative are treated as tied and resolve to the lowest
// index; exact ties arise (e.g. under a unitary channel, where every
// codeword scores the same) only up to factorization noise.
inline SelectionResult select_lambda_min(const Eigen::MatrixXcd& h,
                                         const Codebook& cb) {
  if (h.cols() != cb.n_tx())
    throw parameter_error("select_lambda_min: channel/codebook shape mismatch");
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h * cb.entry(i));
    double score = svd.singularValues().minCoeff();
    if (i == 0 ||
        score > best_score + 1e-9 * std::max(1.0, std::abs(best_score))) {
      best_score = score;
      best = i;
    }
  }
  return {best, PhaseVector::zeros(cb.n_streams()), -best_score};
}

}  // namespace bicmb
