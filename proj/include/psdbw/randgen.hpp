#pragma once

#include "psdbw/symmat.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace psdbw {

struct RngSeed {
  std::uint64_t value = 0;
};

// Seed splitting: child = splitmix64(parent XOR index). Used to give every
// trial (and every perturbation within a trial) its own stream.
std::uint64_t splitmix64(std::uint64_t x);
RngSeed derive_seed(RngSeed parent, std::uint64_t index);

/// mt19937_64 engine with portable uniform and normal draws: uniforms take
/// the top 53 bits of one engine output, normals use Box-Muller. Unlike the
/// <random> distributions this yields the same stream on every standard
/// library.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64; uniform = (x >> 11) * 2^-53; normal = Box-Muller; child seed = splitmix64(seed ^ index)";

  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct SpectrumSpec {
  int dim = 0;
  double small_fraction = 0.0;
  double small_scale = 1e-3;
  double bulk_low = 0.5;
  double bulk_high = 1.5;

  /// ceil(p * n), with a 1e-9 guard against products like 0.1 * 30 that land
  /// just above an integer.
  int small_count() const;
  void validate() const;
};

/// Haar-distributed orthogonal matrix: QR of a standard normal matrix with
/// columns sign-corrected so that R has a positive diagonal.
Matrix random_orthogonal(int n, Rng& rng);

/// Q diag(lambda) Q^T with Haar Q; small_count() eigenvalues are drawn from
/// U(0.5 s, 1.5 s) for s = small_scale and the rest from U(bulk_low, bulk_high).
SymMatrix random_spd(const SpectrumSpec& spec, Rng& rng);
SymMatrix random_spd(const SpectrumSpec& spec, RngSeed seed);

/// Symmetrized standard normal matrix rescaled to the given spectral norm.
/// A zero scale yields the zero matrix.
SymMatrix random_perturbation(int n, double spectral_scale, Rng& rng);
SymMatrix random_perturbation(int n, double spectral_scale, RngSeed seed);

/// A + E, clipped to eigenvalues >= floor (0 for Bures-Wasserstein inputs,
/// the regularization floor for affine-invariant inputs).
SymMatrix perturb_psd(const SymMatrix& a, const SymMatrix& e, double floor = 0.0);

}  // namespace psdbw
