#pragma once

#include "psdbw/geometry.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace psdbw {

enum class Algorithm { Inductive, Projection, Cheap };

std::string_view to_string(Algorithm algo);
Algorithm algorithm_from_string(std::string_view name);

struct SolverConfig {
  double epsilon = 1e-3;
  // Defaults to 10000 for the inductive mean and 200 for the other two.
  std::optional<int> max_iters;
  // Cheap mean only: compute the max pairwise distance of the final working
  // set. Costs m(m-1)/2 distance evaluations.
  bool working_set_spread = true;

  int iteration_cap(Algorithm algo) const;
  void validate() const;
};

struct BarycenterResult {
  SymMatrix mean;
  int iterations = 0;
  bool converged = false;
  // Distance between the last two iterates (or, for the cheap mean, between
  // the arithmetic means of the last two working sets).
  double final_step = 0.0;
  Algorithm algorithm = Algorithm::Projection;
  std::string geometry;
  // Empty unless the run stopped on a numerical failure.
  std::string diagnostic;
  std::optional<double> working_set_spread;
};

/// S_1 = A_1, S_k = S_{k-1} #_{1/k} A_{k mod m} along geodesics of `g`,
/// stopping at the end of a full pass over the inputs once every step of
/// that pass moved the iterate by at most epsilon.
BarycenterResult inductive_mean(const Geometry& g, std::span<const SymMatrix> matrices,
                                const SolverConfig& cfg = {});

/// Fixed-point iteration S <- exp_S(mean_j log_S(A_j)) from the arithmetic
/// mean. Exp-domain failures end the run with converged = false.
BarycenterResult projection_mean(const Geometry& g, std::span<const SymMatrix> matrices,
                                 const SolverConfig& cfg = {});

/// Every working copy A_k moves to exp_{A_k}(mean_j log_{A_k}(A_j)) using a
/// snapshot of the previous working set. Returns the arithmetic mean of the
/// final working set.
BarycenterResult cheap_mean(const Geometry& g, std::span<const SymMatrix> matrices,
                            const SolverConfig& cfg = {});

BarycenterResult barycenter(Algorithm algo, const Geometry& g, std::span<const SymMatrix> matrices,
                            const SolverConfig& cfg = {});

/// Sum of squared g-distances from `m` to each matrix.
double ssd(const Geometry& g, std::span<const SymMatrix> matrices, const SymMatrix& m);
double frechet_variance(const Geometry& g, std::span<const SymMatrix> matrices, const SymMatrix& m);

SymMatrix arithmetic_mean(std::span<const SymMatrix> matrices);

}  // namespace psdbw
