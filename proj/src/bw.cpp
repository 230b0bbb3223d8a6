#include "psdbw/bw.hpp"

#include "psdbw/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psdbw {

namespace {

void require_psd(const SymMatrix& a, const char* what) {
  const SpectralDecomp d = spectral_decompose(a);
  const double tol = default_psd_tolerance(a);
  if (d.min_eigenvalue() < -tol) {
    std::ostringstream msg;
    msg << what << " is not PSD: eigenvalue " << d.min_eigenvalue();
    throw NotPsdError(d.min_eigenvalue(), msg.str());
  }
}

SymMatrix combine_geodesic(const SymMatrix& a, const SymMatrix& b, const SymMatrix& cross, double t) {
  const double s = 1.0 - t;
  return SymMatrix(s * s * a.matrix() + t * t * b.matrix() + t * s * cross.matrix());
}

}  // namespace

double bw_distance(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  const SymMatrix a_root = sqrt_psd(a);
  require_psd(b, "second argument");
  if (a.matrix() == b.matrix()) return 0.0;

  const SymMatrix inner(a_root.matrix() * b.matrix() * a_root.matrix());
  const SpectralDecomp d = spectral_decompose(inner);
  double root_trace = 0.0;
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) root_trace += std::sqrt(std::max(d.eigenvalues(i), 0.0));

  const double radicand = a.trace() + b.trace() - 2.0 * root_trace;
  return std::sqrt(std::max(radicand, 0.0));
}

SymMatrix bw_geodesic(const SymMatrix& a, const SymMatrix& b, double t) {
  require_same_dim(a, b);
  const SymMatrix cross = cross_sqrt_sum_from_roots(sqrt_psd(a), sqrt_psd(b));
  return combine_geodesic(a, b, cross, t);
}

SymMatrix bw_pair_mean(const SymMatrix& a, const SymMatrix& b) { return bw_geodesic(a, b, 0.5); }

TangentVector bw_log(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  const SymMatrix cross = cross_sqrt_sum_from_roots(sqrt_psd(a), sqrt_psd(b));
  return TangentVector{SymMatrix(cross.matrix() - 2.0 * a.matrix())};
}

SymMatrix bw_exp(const SymMatrix& a, const TangentVector& x) {
  require_same_dim(a, x.value);
  const SpectralDecomp d = spectral_decompose(a);
  const double tol = default_psd_tolerance(a);
  if (d.min_eigenvalue() <= tol) {
    std::ostringstream msg;
    msg << "exp base not PD: eigenvalue " << d.min_eigenvalue();
    throw NotPdError(d.min_eigenvalue(), msg.str());
  }

  const Matrix& q = d.eigenvectors;
  const Vector& lambda = d.eigenvalues;
  const Eigen::Index n = lambda.size();
  const Matrix xq = q.transpose() * x.value.matrix() * q;
  Matrix weighted(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) weighted(i, j) = xq(i, j) / (lambda(i) + lambda(j));

  const SymMatrix shifted(Matrix::Identity(n, n) + weighted);
  const double shifted_min = spectral_decompose(shifted).min_eigenvalue();
  if (shifted_min < -default_psd_tolerance(shifted)) {
    std::ostringstream msg;
    msg << "tangent vector outside exp domain: I + W o X_Q has eigenvalue " << shifted_min;
    throw ExpDomainError(shifted_min, msg.str());
  }

  const Matrix correction = q * (weighted * lambda.asDiagonal() * weighted) * q.transpose();
  return SymMatrix(a.matrix() + x.value.matrix() + correction);
}

SymMatrix conjugate(const Matrix& q, const SymMatrix& a) {
  if (q.rows() != q.cols()) throw InvalidArgument("conjugating matrix must be square");
  if (q.rows() != a.dim()) throw DimensionMismatch(q.rows(), a.dim());
  const double defect = (q.transpose() * q - Matrix::Identity(q.rows(), q.cols())).norm();
  if (!(defect <= 1e-8)) {
    std::ostringstream msg;
    msg << "conjugating matrix is not orthogonal: ||Q^T Q - I||_F = " << defect;
    throw InvalidArgument(msg.str());
  }
  return SymMatrix(q.transpose() * a.matrix() * q);
}

double BuresWasserstein::distance(const SymMatrix& a, const SymMatrix& b) const { return bw_distance(a, b); }

SymMatrix BuresWasserstein::geodesic(const SymMatrix& a, const SymMatrix& b, double t) const {
  return bw_geodesic(a, b, t);
}

TangentVector BuresWasserstein::log(const SymMatrix& base, const SymMatrix& target) const {
  return bw_log(base, target);
}

SymMatrix BuresWasserstein::exp(const SymMatrix& base, const TangentVector& x) const { return bw_exp(base, x); }

TangentVector BuresWasserstein::mean_log(const SymMatrix& base, std::span<const SymMatrix> targets) const {
  if (targets.empty()) throw InvalidArgument("mean_log needs at least one target");
  const SymMatrix base_root = sqrt_psd(base);
  Matrix sum = Matrix::Zero(base.dim(), base.dim());
  for (const SymMatrix& target : targets) {
    require_same_dim(base, target);
    sum += cross_sqrt_sum_from_roots(base_root, sqrt_psd(target)).matrix();
  }
  const double m = static_cast<double>(targets.size());
  return TangentVector{SymMatrix(sum / m - 2.0 * base.matrix())};
}

}  // namespace psdbw
