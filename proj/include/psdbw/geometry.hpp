#pragma once

#include "psdbw/symmat.hpp"

#include <span>
#include <string_view>

namespace psdbw {

/// Symmetric matrix living in the tangent space at some base point.
struct TangentVector {
  SymMatrix value;

  int base_dim() const noexcept { return value.dim(); }
};

/// Distance, geodesic and log/exp retractions of a Riemannian structure on
/// PSD matrices. Implementations are stateless and safe to share across
/// threads.
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual std::string_view name() const = 0;
  virtual double distance(const SymMatrix& a, const SymMatrix& b) const = 0;
  virtual SymMatrix geodesic(const SymMatrix& a, const SymMatrix& b, double t) const = 0;
  virtual TangentVector log(const SymMatrix& base, const SymMatrix& target) const = 0;
  virtual SymMatrix exp(const SymMatrix& base, const TangentVector& x) const = 0;

  /// (1/m) sum_j log(base, targets[j]). Overridden where the base point's
  /// factorization can be shared across targets.
  virtual TangentVector mean_log(const SymMatrix& base, std::span<const SymMatrix> targets) const;

  SymMatrix pair_mean(const SymMatrix& a, const SymMatrix& b) const { return geodesic(a, b, 0.5); }
};

class BuresWasserstein final : public Geometry {
 public:
  std::string_view name() const override { return "bw"; }
  double distance(const SymMatrix& a, const SymMatrix& b) const override;
  SymMatrix geodesic(const SymMatrix& a, const SymMatrix& b, double t) const override;
  TangentVector log(const SymMatrix& base, const SymMatrix& target) const override;
  SymMatrix exp(const SymMatrix& base, const TangentVector& x) const override;
  TangentVector mean_log(const SymMatrix& base, std::span<const SymMatrix> targets) const override;
};

class AffineInvariant final : public Geometry {
 public:
  std::string_view name() const override { return "ai"; }
  double distance(const SymMatrix& a, const SymMatrix& b) const override;
  SymMatrix geodesic(const SymMatrix& a, const SymMatrix& b, double t) const override;
  TangentVector log(const SymMatrix& base, const SymMatrix& target) const override;
  SymMatrix exp(const SymMatrix& base, const TangentVector& x) const override;
  TangentVector mean_log(const SymMatrix& base, std::span<const SymMatrix> targets) const override;
};

/// Shared instances; throws InvalidArgument for names other than "bw"/"ai".
const Geometry& geometry_by_name(std::string_view name);
const BuresWasserstein& bw_geometry();
const AffineInvariant& ai_geometry();

}  // namespace psdbw
