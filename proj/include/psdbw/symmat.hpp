#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace psdbw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix with full storage.
///
/// Every constructor symmetrizes its input as (M + M^T) / 2 and rejects
/// non-finite entries, so values(i, j) == values(j, i) holds bit-exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(int n);
  static SymMatrix zero(int n);
  static SymMatrix diagonal(std::span<const double> entries);
  static SymMatrix diagonal(const Vector& entries);
  static SymMatrix from_row_major(int dim, std::span<const double> values);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }
  std::vector<double> row_major() const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);
  friend SymMatrix operator*(const SymMatrix& a, double s) { return s * a; }

 private:
  Matrix m_;
};

/// Eigenvalues in ascending order with matching orthonormal eigenvector
/// columns.
struct SpectralDecomp {
  Vector eigenvalues;
  Matrix eigenvectors;

  int dim() const noexcept { return static_cast<int>(eigenvalues.size()); }
  double min_eigenvalue() const { return eigenvalues(0); }
  double max_eigenvalue() const { return eigenvalues(eigenvalues.size() - 1); }

  Matrix reconstruct() const;

  // Q diag(f(lambda)) Q^T.
  template <class F>
  SymMatrix map(F&& f) const {
    Vector mapped(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) mapped(i) = f(eigenvalues(i));
    return SymMatrix(eigenvectors * mapped.asDiagonal() * eigenvectors.transpose());
  }
};

struct PolarFactors {
  Matrix orthogonal;
  SymMatrix psd_part;
};

/// 1e-9 * max(1, ||A||_F): eigenvalues in (-tol, 0) are treated as roundoff.
double default_psd_tolerance(const SymMatrix& a);

/// Cyclic Jacobi eigendecomposition. Stops once the off-diagonal Frobenius
/// norm drops to 1e-12 * ||A||_F; throws ConvergenceError after 100 sweeps.
SpectralDecomp spectral_decompose(const SymMatrix& a);

/// Principal square root of a PSD matrix. Eigenvalues in (-tol, 0) are
/// clipped to zero; anything below -tol raises NotPsdError.
SymMatrix sqrt_psd(const SymMatrix& a, std::optional<double> tol_psd = std::nullopt);
SymMatrix sqrt_psd(const SpectralDecomp& d, double tol_psd);

/// Polar decomposition X = orthogonal * psd_part through the SVD
/// X = W S V^T: orthogonal = W V^T, psd_part = V S V^T = (X^T X)^{1/2}.
PolarFactors polar_psd_part(const Matrix& x);

/// (AB)^{1/2} := A^{1/2} U^T B^{1/2}, where U is the orthogonal polar factor
/// of B^{1/2} A^{1/2}. Valid for singular A. Takes the square roots directly.
Matrix product_sqrt_from_roots(const SymMatrix& a_root, const SymMatrix& b_root);
Matrix product_sqrt(const SymMatrix& a, const SymMatrix& b);

/// (AB)^{1/2} + (BA)^{1/2}, the coupling term of every Bures-Wasserstein
/// formula.
SymMatrix cross_sqrt_sum(const SymMatrix& a, const SymMatrix& b);
SymMatrix cross_sqrt_sum_from_roots(const SymMatrix& a_root, const SymMatrix& b_root);

SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b);
double frobenius_dist(const SymMatrix& a, const SymMatrix& b);

/// Raises every eigenvalue below `floor` to `floor`, keeping eigenvectors.
/// Inputs whose spectrum already sits at or above the floor are returned
/// unchanged.
SymMatrix clip_to_psd(const SymMatrix& a, double floor);

void require_same_dim(const SymMatrix& a, const SymMatrix& b);

}  // namespace psdbw
