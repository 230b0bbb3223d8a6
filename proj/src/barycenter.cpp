#include "psdbw/barycenter.hpp"

#include "psdbw/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace psdbw {

namespace {

void validate_inputs(std::span<const SymMatrix> matrices) {
  if (matrices.empty()) throw InvalidArgument("barycenter needs at least one matrix");
  for (const SymMatrix& a : matrices) require_same_dim(matrices.front(), a);
}

// Orthonormal basis of the range of the arithmetic mean. When every input
// shares a null direction the exp-based solvers run on the compressed
// problem and embed the answer back with zeros.
struct Deflation {
  Matrix basis;
  bool active = false;
  bool all_zero = false;

  std::vector<SymMatrix> compress(std::span<const SymMatrix> matrices) const {
    std::vector<SymMatrix> out;
    out.reserve(matrices.size());
    for (const SymMatrix& a : matrices) out.emplace_back(basis.transpose() * a.matrix() * basis);
    return out;
  }

  SymMatrix expand(const SymMatrix& m) const { return SymMatrix(basis * m.matrix() * basis.transpose()); }
};

Deflation find_common_null_space(std::span<const SymMatrix> matrices) {
  const SymMatrix mean = arithmetic_mean(matrices);
  const SpectralDecomp d = spectral_decompose(mean);
  const double tol = default_psd_tolerance(mean);
  const Eigen::Index n = d.eigenvalues.size();
  Eigen::Index first_kept = 0;
  while (first_kept < n && d.eigenvalues(first_kept) <= tol) ++first_kept;

  Deflation out;
  if (first_kept == 0) return out;
  out.active = true;
  out.all_zero = first_kept == n;
  out.basis = d.eigenvectors.rightCols(n - first_kept);
  return out;
}

BarycenterResult start_result(Algorithm algo, const Geometry& g) {
  BarycenterResult r;
  r.algorithm = algo;
  r.geometry = std::string(g.name());
  return r;
}

using Solver = BarycenterResult (*)(const Geometry&, std::span<const SymMatrix>, const SolverConfig&);

// Runs an exp-based solver on the deflated problem when the inputs share a
// null space.
BarycenterResult with_deflation(Algorithm algo, Solver solve, const Geometry& g,
                                std::span<const SymMatrix> matrices, const SolverConfig& cfg) {
  const Deflation deflation = find_common_null_space(matrices);
  if (!deflation.active) return solve(g, matrices, cfg);
  if (deflation.all_zero) {
    BarycenterResult r = start_result(algo, g);
    r.mean = SymMatrix::zero(matrices.front().dim());
    r.converged = true;
    return r;
  }
  const std::vector<SymMatrix> compressed = deflation.compress(matrices);
  BarycenterResult r = solve(g, compressed, cfg);
  r.mean = deflation.expand(r.mean);
  return r;
}

BarycenterResult projection_core(const Geometry& g, std::span<const SymMatrix> matrices, const SolverConfig& cfg) {
  BarycenterResult r = start_result(Algorithm::Projection, g);
  const int cap = cfg.iteration_cap(Algorithm::Projection);
  SymMatrix s = arithmetic_mean(matrices);
  try {
    for (int it = 1; it <= cap; ++it) {
      const TangentVector x = g.mean_log(s, matrices);
      SymMatrix next = g.exp(s, x);
      const double step = g.distance(next, s);
      s = std::move(next);
      r.iterations = it;
      r.final_step = step;
      if (step <= cfg.epsilon) {
        r.converged = true;
        break;
      }
    }
  } catch (const NumericalError& e) {
    r.diagnostic = e.what();
  }
  r.mean = std::move(s);
  return r;
}

BarycenterResult cheap_core(const Geometry& g, std::span<const SymMatrix> matrices, const SolverConfig& cfg) {
  BarycenterResult r = start_result(Algorithm::Cheap, g);
  const int cap = cfg.iteration_cap(Algorithm::Cheap);
  std::vector<SymMatrix> work(matrices.begin(), matrices.end());
  SymMatrix mean = arithmetic_mean(work);
  try {
    for (int it = 1; it <= cap; ++it) {
      // `work` is the read-only snapshot for this sweep.
      std::vector<SymMatrix> next;
      next.reserve(work.size());
      for (const SymMatrix& base : work) next.push_back(g.exp(base, g.mean_log(base, work)));
      SymMatrix next_mean = arithmetic_mean(next);
      const double step = g.distance(next_mean, mean);
      work = std::move(next);
      mean = std::move(next_mean);
      r.iterations = it;
      r.final_step = step;
      if (step <= cfg.epsilon) {
        r.converged = true;
        break;
      }
    }
    if (cfg.working_set_spread) {
      double spread = 0.0;
      for (std::size_t i = 0; i < work.size(); ++i)
        for (std::size_t j = i + 1; j < work.size(); ++j) spread = std::max(spread, g.distance(work[i], work[j]));
      r.working_set_spread = spread;
    }
  } catch (const NumericalError& e) {
    r.diagnostic = e.what();
  }
  r.mean = std::move(mean);
  return r;
}

}  // namespace

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::Inductive:
      return "inductive";
    case Algorithm::Projection:
      return "projection";
    case Algorithm::Cheap:
      return "cheap";
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "inductive") return Algorithm::Inductive;
  if (name == "projection") return Algorithm::Projection;
  if (name == "cheap") return Algorithm::Cheap;
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "' (expected inductive, projection or cheap)");
}

int SolverConfig::iteration_cap(Algorithm algo) const {
  if (max_iters) return *max_iters;
  return algo == Algorithm::Inductive ? 10000 : 200;
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be a positive finite number");
  if (max_iters && *max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
}

SymMatrix arithmetic_mean(std::span<const SymMatrix> matrices) {
  validate_inputs(matrices);
  Matrix sum = Matrix::Zero(matrices.front().dim(), matrices.front().dim());
  for (const SymMatrix& a : matrices) sum += a.matrix();
  return SymMatrix(sum / static_cast<double>(matrices.size()));
}

BarycenterResult inductive_mean(const Geometry& g, std::span<const SymMatrix> matrices, const SolverConfig& cfg) {
  validate_inputs(matrices);
  cfg.validate();
  BarycenterResult r = start_result(Algorithm::Inductive, g);
  const int cap = cfg.iteration_cap(Algorithm::Inductive);
  const std::size_t m = matrices.size();
  SymMatrix s = matrices.front();
  // Convergence is only tested once S_k has absorbed a whole cycle of inputs
  // (k a multiple of m), and requires every step of that cycle to be within
  // epsilon. A single short step can otherwise end the run far from the mean.
  double cycle_max = 0.0;
  try {
    for (int it = 1; it <= cap; ++it) {
      const std::size_t k = static_cast<std::size_t>(it) + 1;
      SymMatrix next = g.geodesic(s, matrices[(k - 1) % m], 1.0 / static_cast<double>(k));
      const double step = g.distance(next, s);
      s = std::move(next);
      r.iterations = it;
      r.final_step = step;
      cycle_max = std::max(cycle_max, step);
      if (k % m == 0) {
        if (cycle_max <= cfg.epsilon) {
          r.converged = true;
          break;
        }
        cycle_max = 0.0;
      }
    }
  } catch (const NumericalError& e) {
    r.diagnostic = e.what();
  }
  r.mean = std::move(s);
  return r;
}

BarycenterResult projection_mean(const Geometry& g, std::span<const SymMatrix> matrices, const SolverConfig& cfg) {
  validate_inputs(matrices);
  cfg.validate();
  return with_deflation(Algorithm::Projection, &projection_core, g, matrices, cfg);
}

BarycenterResult cheap_mean(const Geometry& g, std::span<const SymMatrix> matrices, const SolverConfig& cfg) {
  validate_inputs(matrices);
  cfg.validate();
  return with_deflation(Algorithm::Cheap, &cheap_core, g, matrices, cfg);
}

BarycenterResult barycenter(Algorithm algo, const Geometry& g, std::span<const SymMatrix> matrices,
                            const SolverConfig& cfg) {
  switch (algo) {
    case Algorithm::Inductive:
      return inductive_mean(g, matrices, cfg);
    case Algorithm::Projection:
      return projection_mean(g, matrices, cfg);
    case Algorithm::Cheap:
      return cheap_mean(g, matrices, cfg);
  }
  throw InvalidArgument("unknown algorithm");
}

double ssd(const Geometry& g, std::span<const SymMatrix> matrices, const SymMatrix& m) {
  double total = 0.0;
  for (const SymMatrix& a : matrices) {
    const double d = g.distance(a, m);
    total += d * d;
  }
  return total;
}

double frechet_variance(const Geometry& g, std::span<const SymMatrix> matrices, const SymMatrix& m) {
  if (matrices.empty()) throw InvalidArgument("Frechet variance of an empty set");
  return ssd(g, matrices, m) / static_cast<double>(matrices.size());
}

}  // namespace psdbw
