#pragma once

// Test-side generators and oracles. Everything here is independent of the
// library's own eigensolver, polar factor and random generator so that
// property tests compare two separate computations.

#include "psdbw/symmat.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>

namespace testing_support {

using psdbw::Matrix;
using psdbw::SymMatrix;
using psdbw::Vector;

// splitmix64 stream; deliberately not the library's mt19937_64.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Matrix normal_matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  Matrix orthogonal(int n) {
    Eigen::HouseholderQR<Matrix> qr(normal_matrix(n, n));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
  }

  // Q diag(lambda) Q^T with log-uniform eigenvalues in [lo, hi].
  SymMatrix spd(int n, double lo = 0.2, double hi = 5.0) {
    Vector lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = std::exp(uniform(std::log(lo), std::log(hi)));
    const Matrix q = orthogonal(n);
    return SymMatrix(q * lambda.asDiagonal() * q.transpose());
  }

  // Rank-deficient PSD matrix of the given rank.
  SymMatrix psd_rank(int n, int rank) {
    const Matrix g = normal_matrix(n, rank);
    return SymMatrix(g * g.transpose() / static_cast<double>(rank));
  }

  SymMatrix symmetric(int n, double scale = 1.0) {
    const Matrix g = normal_matrix(n, n);
    return SymMatrix(scale * 0.5 * (g + g.transpose()));
  }

  Vector positive_vector(int n, double lo, double hi) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t state_;
};

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}
inline double rel_err(const SymMatrix& got, const SymMatrix& want) { return rel_err(got.matrix(), want.matrix()); }
inline double rel_err(const SymMatrix& got, const Matrix& want) { return rel_err(got.matrix(), want); }

// Square root through Eigen's tridiagonal QR eigensolver.
inline Matrix oracle_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

// Orthogonal factor of the polar decomposition via divide-and-conquer SVD.
inline Matrix oracle_polar_orthogonal(const Matrix& x) {
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

// ||A^{1/2} - B^{1/2} U||_F with U the orthogonal polar factor of B^{1/2} A^{1/2}.
inline double oracle_bw_distance(const Matrix& a, const Matrix& b) {
  const Matrix ra = oracle_sqrt(a);
  const Matrix rb = oracle_sqrt(b);
  const Matrix u = oracle_polar_orthogonal(rb * ra);
  return (ra - rb * u).norm();
}

// |(1-t) A^{1/2} + t U^T B^{1/2}|^2.
inline Matrix oracle_bw_geodesic(const Matrix& a, const Matrix& b, double t) {
  const Matrix ra = oracle_sqrt(a);
  const Matrix rb = oracle_sqrt(b);
  const Matrix u = oracle_polar_orthogonal(rb * ra);
  const Matrix m = (1.0 - t) * ra + t * u.transpose() * rb;
  return m.transpose() * m;
}

// Generalized eigenvalues of B x = mu A x.
inline double oracle_ai_distance(const Matrix& a, const Matrix& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(b, a);
  return es.eigenvalues().array().log().matrix().norm();
}

}  // namespace testing_support
