#pragma once

// Complex-matrix primitives shared by the whole library: ordered SVD with a
// deterministic phase convention, leading-column truncation, diagonal phase
// rotations, Frobenius distances, and the closest-unitary projection.
//
// Conventions:
//  - A channel is M x N (receive x transmit); its thin SVD is U (M x q),
//    sigma (q, descending), V (N x q), q = min(M, N).
//  - Each right-singular column is rotated so that its largest-magnitude
//    entry is real and nonnegative, with the matching left column rotated by
//    the conjugate phase. This pins one representative of the diagonal-phase
//    family of valid decompositions.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "bicmb/errors.hpp"

namespace bicmb {

using Cplx = std::complex<double>;

// Relative tolerance of the SVD contract checks (reconstruction and
// orthonormality of the computed factors).
inline constexpr double kSvdTol = 1e-10;

// Smallest singular value (relative to the largest) still treated as full
// rank by closest_unitary and the equalizers.
inline constexpr double kRankTol = 1e-12;

struct SvdTriple {
  Eigen::MatrixXcd u;      // M x q, orthonormal columns
  Eigen::VectorXd sigma;   // q, descending
  Eigen::MatrixXcd v;      // N x q, orthonormal columns
};

struct TruncatedSvd {
  Eigen::MatrixXcd u;      // M x S
  Eigen::VectorXd sigma;   // S largest values
  Eigen::MatrixXcd v;      // N x S
};

// S per-column phase angles, each kept in [0, 2*pi).
struct PhaseVector {
  Eigen::ArrayXd theta;

  PhaseVector() = default;
  explicit PhaseVector(Eigen::ArrayXd raw) : theta(std::move(raw)) {
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = wrap(theta[i]);
  }

  static PhaseVector zeros(Eigen::Index n) {
    PhaseVector p;
    p.theta = Eigen::ArrayXd::Zero(n);
    return p;
  }

  Eigen::Index size() const { return theta.size(); }
  double operator[](Eigen::Index i) const { return theta[i]; }

  static double wrap(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    if (a >= 2.0 * M_PI) a = 0.0;
    return a;
  }
};

inline PhaseVector compose_phases(const PhaseVector& a, const PhaseVector& b) {
  if (a.size() != b.size())
    throw parameter_error("compose_phases: length mismatch");
  return PhaseVector(a.theta + b.theta);
}

namespace detail {

inline std::string shape_of(const Eigen::MatrixXcd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

// Rotates column k of v (and the matching column of u) so that the
// largest-magnitude entry of v's column is real and nonnegative. First
// index attaining the maximum wins, which makes the rule deterministic.
inline void canonicalize_pair(Eigen::MatrixXcd& u, Eigen::MatrixXcd& v,
                              Eigen::Index k) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    double a = std::abs(v(i, k));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best <= 0.0) return;
  Cplx rot = std::conj(v(imax, k)) / best;
  v.col(k) *= rot;
  u.col(k) *= rot;
}

}  // namespace detail

// || M^H M - I ||_F; zero for orthonormal columns.
inline double orthonormality_defect(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd g = m.adjoint() * m;
  g -= Eigen::MatrixXcd::Identity(m.cols(), m.cols());
  return g.norm();
}

// Thin SVD with descending singular values and the deterministic column
// phase convention described at the top of this file.
inline SvdTriple svd_ordered(const Eigen::MatrixXcd& h) {
  if (h.rows() < 1 || h.cols() < 1)
    throw parameter_error("svd_ordered: empty matrix");
  if (!h.allFinite())
    throw parameter_error("svd_ordered: non-finite entries");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdTriple t;
  t.u = svd.matrixU();
  t.sigma = svd.singularValues();
  t.v = svd.matrixV();

  for (Eigen::Index k = 0; k < t.v.cols(); ++k)
    detail::canonicalize_pair(t.u, t.v, k);

  // Contract checks: descending order, orthonormal factors, reconstruction.
  for (Eigen::Index i = 0; i + 1 < t.sigma.size(); ++i) {
    if (t.sigma[i] < t.sigma[i + 1])
      throw decomposition_error("svd_ordered: values out of order for " +
                                detail::shape_of(h));
  }
  double scale = h.norm();
  double resid = (t.u * t.sigma.asDiagonal() * t.v.adjoint() - h).norm();
  if (resid > kSvdTol * std::max(scale, 1e-300) && scale > 0.0)
    throw decomposition_error("svd_ordered: reconstruction residual " +
                              std::to_string(resid / scale) + " for " +
                              detail::shape_of(h));
  double qd = std::max(orthonormality_defect(t.u), orthonormality_defect(t.v));
  if (qd > kSvdTol)
    throw decomposition_error("svd_ordered: factor orthonormality defect " +
                              std::to_string(qd) + " for " +
                              detail::shape_of(h));
  return t;
}

// Leading S columns of U and V plus the S largest singular values.
inline TruncatedSvd truncate(const SvdTriple& t, Eigen::Index s) {
  if (s < 1 || s > t.sigma.size())
    throw parameter_error("truncate: stream count out of range");
  TruncatedSvd r;
  r.u = t.u.leftCols(s);
  r.sigma = t.sigma.head(s);
  r.v = t.v.leftCols(s);
  return r;
}

// Column k of the result is e^{j theta_k} times column k of V.
inline Eigen::MatrixXcd apply_phases(const Eigen::MatrixXcd& v,
                                     const PhaseVector& p) {
  if (p.size() != v.cols())
    throw parameter_error("apply_phases: phase count != column count");
  Eigen::MatrixXcd out = v;
  for (Eigen::Index k = 0; k < v.cols(); ++k)
    out.col(k) *= Cplx(std::cos(p[k]), std::sin(p[k]));
  return out;
}

inline double frob_dist_sq(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw parameter_error("frob_dist_sq: shape mismatch " + detail::shape_of(a) +
                          " vs " + detail::shape_of(b));
  return (a - b).squaredNorm();
}

// Orthonormal-column matrix closest to E in Frobenius norm: with
// E = U S W^H (thin), the minimizer is U W^H. Requires full column rank.
inline Eigen::MatrixXcd closest_unitary(const Eigen::MatrixXcd& e) {
  if (e.rows() < e.cols() || e.cols() < 1)
    throw parameter_error("closest_unitary: need rows >= cols >= 1");
  if (!e.allFinite())
    throw parameter_error("closest_unitary: non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[0] <= 0.0 || sv[sv.size() - 1] <= kRankTol * sv[0])
    throw rank_error("closest_unitary: rank-deficient input " +
                     detail::shape_of(e));
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace bicmb
