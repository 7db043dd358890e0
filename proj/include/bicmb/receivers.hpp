#pragma once

// Linear equalizers and soft bit metrics.
//
// All receivers consume the M x K received block Y and emit the S x K
// equalized block r plus the per-stream parameters their metric needs:
//   zf:   G = (A^H A)^{-1} A^H with A = H*V_L; metric |r - x|^2 / ||g_s||^2,
//         g_s the s-th row of G taken as a column.
//   mmse: G = (A^H A + sigma^2 I)^{-1} A^H and W = (A^H A + sigma^2 I)^{-1}
//         (A^H A); metric (W_ss/(1-W_ss)) |r/W_ss - x|^2.
//   svd:  G = diag(e^{-j theta_s}) * Ubar^H; the residual interference plus
//         noise is treated as Gaussian with variance
//         sigma_s~^2 = lambda_s^2 sum_{i != s} |v_s^H v_{L,i}|^2 + sigma^2,
//         and the signal gain is lambda_s~ = lambda_s |v_s^H v_{L,s}|;
//         metric |r - lambda_s~ x|^2 / sigma_s~^2.
//   perfect-csit baseline: r' = Ubar^H Y, metric |r' - lambda_s x|^2.
//
// Every metric minimizes over the 8-point subset chi_b^i by direct scan.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

#include "bicmb/bit_metrics.hpp"
#include "bicmb/constellation.hpp"
#include "bicmb/errors.hpp"
#include "bicmb/linalg.hpp"

namespace bicmb {

enum class ReceiverKind { kZf, kMmse, kSvdReceiver, kPerfectCsit };

struct EqualizedBlock {
  ReceiverKind kind = ReceiverKind::kZf;
  Eigen::MatrixXcd r;              // S x K equalized samples
  Eigen::VectorXd g_norm_sq;       // zf: ||g_s||^2 per stream
  Eigen::VectorXd w_diag;          // mmse: W_ss per stream
  Eigen::VectorXd lambda_tilde;    // svd receiver: effective gain
  Eigen::VectorXd sigma_tilde_sq;  // svd receiver: interference + noise power
  Eigen::VectorXd lambda;          // perfect csit: singular values
};

struct SvdReceiverParams {
  Eigen::VectorXd lambda_tilde;
  Eigen::VectorXd sigma_tilde_sq;
};

namespace detail {

inline void check_effective_rank(const Eigen::MatrixXcd& a, const char* who) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv[0] <= 0.0 || sv[sv.size() - 1] <= kRankTol * sv[0])
    throw rank_error(std::string(who) + ": effective channel rank-deficient");
}

// gamma(k,s,i,b) = scale_s * min over chi_b^i of |rho(s,k) - gain_s * x|^2.
inline BitMetricTable subset_min_metrics(const Eigen::MatrixXcd& rho,
                                         const Eigen::VectorXd& gain,
                                         const Eigen::VectorXd& scale) {
  const auto& qam = ConstellationMap::qam16();
  const int s_count = static_cast<int>(rho.rows());
  const std::size_t k_count = static_cast<std::size_t>(rho.cols());
  BitMetricTable out(k_count, s_count, ConstellationMap::kBitsPerSymbol);
  for (std::size_t k = 0; k < k_count; ++k)
    for (int s = 0; s < s_count; ++s) {
      const Cplx r = rho(s, k);
      const double a = gain[s];
      const double c = scale[s];
      for (int i = 0; i < ConstellationMap::kBitsPerSymbol; ++i)
        for (int b = 0; b < 2; ++b) {
          double best = std::numeric_limits<double>::infinity();
          for (const Cplx& x : qam.subset(i, b)) {
            double d = std::norm(r - a * x);
            if (d < best) best = d;
          }
          out.at(k, s, i, b) = c * best;
        }
    }
  return out;
}

}  // namespace detail

inline EqualizedBlock zf_equalize(const Eigen::MatrixXcd& h,
                                  const Eigen::MatrixXcd& precoder,
                                  const Eigen::MatrixXcd& y) {
  if (h.cols() != precoder.rows() || y.rows() != h.rows())
    throw parameter_error("zf_equalize: shape mismatch");
  Eigen::MatrixXcd a = h * precoder;  // M x S
  detail::check_effective_rank(a, "zf_equalize");
  Eigen::MatrixXcd gram_inv = (a.adjoint() * a).inverse();
  Eigen::MatrixXcd g = gram_inv * a.adjoint();  // S x M
  EqualizedBlock eq;
  eq.kind = ReceiverKind::kZf;
  eq.r = g * y;
  eq.g_norm_sq = g.rowwise().squaredNorm();
  return eq;
}

inline BitMetricTable zf_metrics(const EqualizedBlock& eq) {
  if (eq.kind != ReceiverKind::kZf || eq.g_norm_sq.size() != eq.r.rows())
    throw parameter_error("zf_metrics: zf parameters missing");
  Eigen::VectorXd gain = Eigen::VectorXd::Ones(eq.r.rows());
  Eigen::VectorXd scale = eq.g_norm_sq.cwiseInverse();
  return detail::subset_min_metrics(eq.r, gain, scale);
}

inline EqualizedBlock mmse_equalize(const Eigen::MatrixXcd& h,
                                    const Eigen::MatrixXcd& precoder,
                                    double sigma2, const Eigen::MatrixXcd& y) {
  if (h.cols() != precoder.rows() || y.rows() != h.rows())
    throw parameter_error("mmse_equalize: shape mismatch");
  if (!(sigma2 > 0.0)) throw parameter_error("mmse_equalize: sigma2 must be > 0");
  Eigen::MatrixXcd a = h * precoder;
  detail::check_effective_rank(a, "mmse_equalize");
  Eigen::MatrixXcd gram = a.adjoint() * a;
  Eigen::MatrixXcd reg = gram;
  reg.diagonal().array() += sigma2;
  Eigen::MatrixXcd reg_inv = reg.inverse();
  EqualizedBlock eq;
  eq.kind = ReceiverKind::kMmse;
  eq.r = reg_inv * (a.adjoint() * y);
  eq.w_diag = (reg_inv * gram).diagonal().real();
  return eq;
}

inline BitMetricTable mmse_metrics(const EqualizedBlock& eq) {
  if (eq.kind != ReceiverKind::kMmse || eq.w_diag.size() != eq.r.rows())
    throw parameter_error("mmse_metrics: mmse parameters missing");
  const Eigen::Index s_count = eq.r.rows();
  Eigen::VectorXd gain = Eigen::VectorXd::Ones(s_count);
  Eigen::VectorXd scale(s_count);
  Eigen::MatrixXcd rho = eq.r;
  for (Eigen::Index s = 0; s < s_count; ++s) {
    double w = eq.w_diag[s];
    if (!(w > 0.0) || w >= 1.0)
      throw parameter_error("mmse_metrics: W_ss outside (0, 1)");
    scale[s] = w / (1.0 - w);
    rho.row(s) /= w;
  }
  return detail::subset_min_metrics(rho, gain, scale);
}

// Effective gain and residual power of each stream for the SVD receiver.
// Both depend on the codeword and the right singular matrix only through
// column inner-product magnitudes, so they are invariant to diagonal phase
// rotations of either factor.
inline SvdReceiverParams svd_receiver_params(const SvdTriple& t, int streams,
                                             const Eigen::MatrixXcd& precoder,
                                             const PhaseVector& phases,
                                             double sigma2) {
  if (streams < 1 || streams > t.sigma.size())
    throw parameter_error("svd_receiver_params: bad stream count");
  if (precoder.rows() != t.v.rows() || precoder.cols() != streams)
    throw parameter_error("svd_receiver_params: precoder shape mismatch");
  if (phases.size() != streams)
    throw parameter_error("svd_receiver_params: phase count mismatch");
  if (!(sigma2 > 0.0))
    throw parameter_error("svd_receiver_params: sigma2 must be > 0");
  SvdReceiverParams p;
  p.lambda_tilde.resize(streams);
  p.sigma_tilde_sq.resize(streams);
  for (int s = 0; s < streams; ++s) {
    const double lam = t.sigma[s];
    double cross = 0.0;
    for (int i = 0; i < streams; ++i) {
      double mag_sq = std::norm(precoder.col(i).dot(t.v.col(s)));  // |v_s^H v_Li|^2
      if (i == s)
        p.lambda_tilde[s] = lam * std::sqrt(mag_sq);
      else
        cross += mag_sq;
    }
    p.sigma_tilde_sq[s] = lam * lam * cross + sigma2;
  }
  return p;
}

// r_{k,s} = e^{-j theta_s} (u_s^H y_k); a unitary row transform, so the
// noise statistics are unchanged.
inline EqualizedBlock svd_receiver_equalize(const SvdTriple& t,
                                            const PhaseVector& phases,
                                            const Eigen::MatrixXcd& y) {
  const Eigen::Index streams = phases.size();
  if (streams < 1 || streams > t.sigma.size())
    throw parameter_error("svd_receiver_equalize: bad phase count");
  if (y.rows() != t.u.rows())
    throw parameter_error("svd_receiver_equalize: block shape mismatch");
  EqualizedBlock eq;
  eq.kind = ReceiverKind::kSvdReceiver;
  eq.r = t.u.leftCols(streams).adjoint() * y;
  for (Eigen::Index s = 0; s < streams; ++s)
    eq.r.row(s) *= Cplx(std::cos(phases[s]), -std::sin(phases[s]));
  return eq;
}

inline BitMetricTable svd_receiver_metrics(const EqualizedBlock& eq) {
  if (eq.kind != ReceiverKind::kSvdReceiver ||
      eq.lambda_tilde.size() != eq.r.rows() ||
      eq.sigma_tilde_sq.size() != eq.r.rows())
    throw parameter_error("svd_receiver_metrics: svd parameters missing");
  return detail::subset_min_metrics(eq.r, eq.lambda_tilde,
                                    eq.sigma_tilde_sq.cwiseInverse());
}

inline EqualizedBlock perfect_csit_equalize(const SvdTriple& t, int streams,
                                            const Eigen::MatrixXcd& y) {
  if (streams < 1 || streams > t.sigma.size())
    throw parameter_error("perfect_csit_equalize: bad stream count");
  if (y.rows() != t.u.rows())
    throw parameter_error("perfect_csit_equalize: block shape mismatch");
  EqualizedBlock eq;
  eq.kind = ReceiverKind::kPerfectCsit;
  eq.r = t.u.leftCols(streams).adjoint() * y;
  eq.lambda = t.sigma.head(streams);
  return eq;
}

inline BitMetricTable perfect_csit_metrics(const EqualizedBlock& eq) {
  if (eq.kind != ReceiverKind::kPerfectCsit || eq.lambda.size() != eq.r.rows())
    throw parameter_error("perfect_csit_metrics: parameters missing");
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(eq.r.rows());
  return detail::subset_min_metrics(eq.r, eq.lambda, scale);
}

// Baseline metrics in one shot; assumes the transmitter used the leading
// right singular columns as the precoder.
inline BitMetricTable perfect_csit_metrics(const SvdTriple& t, int streams,
                                           const Eigen::MatrixXcd& y) {
  return perfect_csit_metrics(perfect_csit_equalize(t, streams, y));
}

}  // namespace bicmb
