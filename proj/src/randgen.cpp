#include "psdbw/randgen.hpp"

#include "psdbw/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psdbw {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSeed derive_seed(RngSeed parent, std::uint64_t index) { return RngSeed{splitmix64(parent.value ^ index)}; }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double out = *spare_;
    spare_.reset();
    return out;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

int SpectrumSpec::small_count() const {
  return static_cast<int>(std::ceil(small_fraction * static_cast<double>(dim) - 1e-9));
}

void SpectrumSpec::validate() const {
  if (dim <= 0) throw InvalidArgument("spectrum dimension must be positive");
  if (!(small_fraction >= 0.0 && small_fraction < 1.0)) throw InvalidArgument("small_fraction must lie in [0, 1)");
  if (!(small_scale > 0.0)) throw InvalidArgument("small_scale must be positive");
  if (!(bulk_low > 0.0 && bulk_low <= bulk_high)) throw InvalidArgument("need 0 < bulk_low <= bulk_high");
  if (!(small_scale < bulk_low)) throw InvalidArgument("small_scale must be below bulk_low");
  if (small_count() >= dim)
    throw InvalidArgument("ceil(p * n) = " + std::to_string(small_count()) + " leaves no bulk eigenvalues for n = " +
                          std::to_string(dim));
}

Matrix random_orthogonal(int n, Rng& rng) {
  Matrix g(n, n);
  // Row-major fill keeps the draw order independent of Eigen's storage order.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& packed = qr.matrixQR();
  for (int i = 0; i < n; ++i)
    if (packed(i, i) < 0.0) q.col(i) *= -1.0;
  return q;
}

SymMatrix random_spd(const SpectrumSpec& spec, Rng& rng) {
  spec.validate();
  const int n = spec.dim;
  const Matrix q = random_orthogonal(n, rng);
  const int small = spec.small_count();
  Vector lambda(n);
  for (int i = 0; i < n; ++i) {
    lambda(i) = i < small ? rng.uniform(0.5 * spec.small_scale, 1.5 * spec.small_scale)
                          : rng.uniform(spec.bulk_low, spec.bulk_high);
  }
  return SymMatrix(q * lambda.asDiagonal() * q.transpose());
}

SymMatrix random_spd(const SpectrumSpec& spec, RngSeed seed) {
  Rng rng(seed);
  return random_spd(spec, rng);
}

SymMatrix random_perturbation(int n, double spectral_scale, Rng& rng) {
  if (n <= 0) throw InvalidArgument("perturbation dimension must be positive");
  if (!(spectral_scale >= 0.0) || !std::isfinite(spectral_scale))
    throw InvalidArgument("spectral scale must be finite and non-negative");
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  const SymMatrix sym(g);
  if (spectral_scale == 0.0) return SymMatrix::zero(n);
  const SpectralDecomp d = spectral_decompose(sym);
  const double norm = std::max(std::abs(d.min_eigenvalue()), std::abs(d.max_eigenvalue()));
  return SymMatrix((spectral_scale / norm) * sym.matrix());
}

SymMatrix random_perturbation(int n, double spectral_scale, RngSeed seed) {
  Rng rng(seed);
  return random_perturbation(n, spectral_scale, rng);
}

SymMatrix perturb_psd(const SymMatrix& a, const SymMatrix& e, double floor) {
  require_same_dim(a, e);
  return clip_to_psd(a + e, floor);
}

}  // namespace psdbw
