#include "psdbw/ai.hpp"

#include "psdbw/error.hpp"

#include <cmath>
#include <sstream>

namespace psdbw {

namespace {

// A^{1/2} and A^{-1/2} from one eigendecomposition of a PD matrix.
struct PdFactors {
  Matrix root;
  Matrix inv_root;
};

PdFactors pd_factors(const SymMatrix& a) {
  const SpectralDecomp d = spectral_decompose(a);
  if (d.min_eigenvalue() <= default_psd_tolerance(a)) {
    std::ostringstream msg;
    msg << "matrix is not PD: eigenvalue " << d.min_eigenvalue() << " (regularize with clip_to_psd)";
    throw NotPdError(d.min_eigenvalue(), msg.str());
  }
  return PdFactors{d.map([](double x) { return std::sqrt(x); }).matrix(),
                   d.map([](double x) { return 1.0 / std::sqrt(x); }).matrix()};
}

// Spectrum of A^{-1/2} B A^{-1/2}; positive iff B is PD.
SpectralDecomp whitened(const PdFactors& f, const SymMatrix& b) {
  SpectralDecomp d = spectral_decompose(SymMatrix(f.inv_root * b.matrix() * f.inv_root));
  if (d.min_eigenvalue() <= 0.0) {
    std::ostringstream msg;
    msg << "second argument is not PD: whitened eigenvalue " << d.min_eigenvalue();
    throw NotPdError(d.min_eigenvalue(), msg.str());
  }
  return d;
}

SymMatrix unwhiten(const PdFactors& f, const Matrix& inner) { return SymMatrix(f.root * inner * f.root); }

}  // namespace

double ai_distance(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  const PdFactors f = pd_factors(a);
  const SpectralDecomp d = whitened(f, b);
  if (a.matrix() == b.matrix()) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
    const double l = std::log(d.eigenvalues(i));
    s += l * l;
  }
  return std::sqrt(s);
}

SymMatrix ai_geodesic(const SymMatrix& a, const SymMatrix& b, double t) {
  require_same_dim(a, b);
  const PdFactors f = pd_factors(a);
  const SpectralDecomp d = whitened(f, b);
  return unwhiten(f, d.map([t](double x) { return std::pow(x, t); }).matrix());
}

SymMatrix ai_pair_mean(const SymMatrix& a, const SymMatrix& b) { return ai_geodesic(a, b, 0.5); }

TangentVector ai_log(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  const PdFactors f = pd_factors(a);
  const SpectralDecomp d = whitened(f, b);
  return TangentVector{unwhiten(f, d.map([](double x) { return std::log(x); }).matrix())};
}

SymMatrix ai_exp(const SymMatrix& a, const TangentVector& x) {
  require_same_dim(a, x.value);
  const PdFactors f = pd_factors(a);
  const SpectralDecomp d = spectral_decompose(SymMatrix(f.inv_root * x.value.matrix() * f.inv_root));
  return unwhiten(f, d.map([](double v) { return std::exp(v); }).matrix());
}

double AffineInvariant::distance(const SymMatrix& a, const SymMatrix& b) const { return ai_distance(a, b); }

SymMatrix AffineInvariant::geodesic(const SymMatrix& a, const SymMatrix& b, double t) const {
  return ai_geodesic(a, b, t);
}

TangentVector AffineInvariant::log(const SymMatrix& base, const SymMatrix& target) const {
  return ai_log(base, target);
}

SymMatrix AffineInvariant::exp(const SymMatrix& base, const TangentVector& x) const { return ai_exp(base, x); }

TangentVector AffineInvariant::mean_log(const SymMatrix& base, std::span<const SymMatrix> targets) const {
  if (targets.empty()) throw InvalidArgument("mean_log needs at least one target");
  const PdFactors f = pd_factors(base);
  Matrix sum = Matrix::Zero(base.dim(), base.dim());
  for (const SymMatrix& target : targets) {
    require_same_dim(base, target);
    sum += whitened(f, target).map([](double x) { return std::log(x); }).matrix();
  }
  return TangentVector{unwhiten(f, sum / static_cast<double>(targets.size()))};
}

}  // namespace psdbw
