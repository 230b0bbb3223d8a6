#include "psdbw/symmat.hpp"

#include "psdbw/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace psdbw {

namespace {

constexpr double kJacobiRelTol = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

double off_diagonal_norm(const Matrix& m) {
  double s = 0.0;
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols())
    throw InvalidArgument("SymMatrix needs a square matrix, got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  if (!m.allFinite()) throw InvalidArgument("SymMatrix entries must be finite");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::zero(int n) { return SymMatrix(Matrix::Zero(n, n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> entries) {
  Vector v(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) v(static_cast<Eigen::Index>(i)) = entries[i];
  return diagonal(v);
}

SymMatrix SymMatrix::diagonal(const Vector& entries) { return SymMatrix(Matrix(entries.asDiagonal())); }

SymMatrix SymMatrix::from_row_major(int dim, std::span<const double> values) {
  if (dim <= 0) throw InvalidArgument("matrix dimension must be positive");
  if (values.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
    throw InvalidArgument("expected " + std::to_string(dim * dim) + " values, got " +
                          std::to_string(values.size()));
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = values[static_cast<std::size_t>(i * dim + j)];
  return SymMatrix(m);
}

std::vector<double> SymMatrix::row_major() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m_.size()));
  for (Eigen::Index i = 0; i < m_.rows(); ++i)
    for (Eigen::Index j = 0; j < m_.cols(); ++j) out.push_back(m_(i, j));
  return out;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  return SymMatrix(a.m_ + b.m_);
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  return SymMatrix(a.m_ - b.m_);
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

void require_same_dim(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
}

Matrix SpectralDecomp::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

double default_psd_tolerance(const SymMatrix& a) { return 1e-9 * std::max(1.0, a.frobenius_norm()); }

SpectralDecomp spectral_decompose(const SymMatrix& a) {
  const Eigen::Index n = a.dim();
  Matrix m = a.matrix();
  Matrix v = Matrix::Identity(n, n);
  const double norm = m.norm();
  const double threshold = kJacobiRelTol * norm;

  bool converged = norm == 0.0;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    if (off_diagonal_norm(m) <= threshold) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          const double np = c * mkp - s * mkq;
          const double nq = s * mkp + c * mkq;
          m(k, p) = np;
          m(p, k) = np;
          m(k, q) = nq;
          m(q, k) = nq;
        }
        m(p, p) -= t * apq;
        m(q, q) += t * apq;
        m(p, q) = 0.0;
        m(q, p) = 0.0;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_diagonal_norm(m) > threshold) {
    std::ostringstream msg;
    msg << "Jacobi eigensolver did not converge after " << kJacobiMaxSweeps << " sweeps (n = " << n
        << ", ||A||_F = " << norm << ")";
    throw ConvergenceError(msg.str());
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return m(i, i) < m(j, j); });

  SpectralDecomp out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = m(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

SymMatrix sqrt_psd(const SpectralDecomp& d, double tol_psd) {
  if (d.min_eigenvalue() < -tol_psd) {
    std::ostringstream msg;
    msg << "matrix is not PSD: eigenvalue " << d.min_eigenvalue() << " below -" << tol_psd;
    throw NotPsdError(d.min_eigenvalue(), msg.str());
  }
  return d.map([](double x) { return std::sqrt(std::max(x, 0.0)); });
}

SymMatrix sqrt_psd(const SymMatrix& a, std::optional<double> tol_psd) {
  return sqrt_psd(spectral_decompose(a), tol_psd.value_or(default_psd_tolerance(a)));
}

PolarFactors polar_psd_part(const Matrix& x) {
  if (x.rows() != x.cols()) throw InvalidArgument("polar decomposition needs a square matrix");
  if (!x.allFinite()) throw InvalidArgument("polar decomposition input must be finite");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success)
    throw ConvergenceError("SVD did not converge (n = " + std::to_string(x.rows()) + ")");
  const Matrix& w = svd.matrixU();
  const Matrix& v = svd.matrixV();
  return PolarFactors{w * v.transpose(),
                      SymMatrix(v * svd.singularValues().asDiagonal() * v.transpose())};
}

Matrix product_sqrt_from_roots(const SymMatrix& a_root, const SymMatrix& b_root) {
  require_same_dim(a_root, b_root);
  const Matrix& ah = a_root.matrix();
  const Matrix& bh = b_root.matrix();
  const PolarFactors polar = polar_psd_part(bh * ah);
  return ah * polar.orthogonal.transpose() * bh;
}

Matrix product_sqrt(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  return product_sqrt_from_roots(sqrt_psd(a), sqrt_psd(b));
}

SymMatrix cross_sqrt_sum_from_roots(const SymMatrix& a_root, const SymMatrix& b_root) {
  const Matrix r = product_sqrt_from_roots(a_root, b_root);
  return SymMatrix(r + r.transpose());
}

SymMatrix cross_sqrt_sum(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  return cross_sqrt_sum_from_roots(sqrt_psd(a), sqrt_psd(b));
}

SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  return SymMatrix(Matrix(a.matrix().cwiseProduct(b.matrix())));
}

double frobenius_dist(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  return (a.matrix() - b.matrix()).norm();
}

SymMatrix clip_to_psd(const SymMatrix& a, double floor) {
  if (floor < 0.0 || !std::isfinite(floor)) throw InvalidArgument("clip floor must be finite and >= 0");
  const SpectralDecomp d = spectral_decompose(a);
  if (d.min_eigenvalue() >= floor) return a;
  return d.map([floor](double x) { return std::max(x, floor); });
}

}  // namespace psdbw
