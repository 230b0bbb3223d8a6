#include "psdbw/geometry.hpp"

#include "psdbw/ai.hpp"
#include "psdbw/bw.hpp"
#include "psdbw/error.hpp"

#include <string>

namespace psdbw {

TangentVector Geometry::mean_log(const SymMatrix& base, std::span<const SymMatrix> targets) const {
  if (targets.empty()) throw InvalidArgument("mean_log needs at least one target");
  Matrix sum = Matrix::Zero(base.dim(), base.dim());
  for (const SymMatrix& target : targets) sum += log(base, target).value.matrix();
  return TangentVector{SymMatrix(sum / static_cast<double>(targets.size()))};
}

const BuresWasserstein& bw_geometry() {
  static const BuresWasserstein instance;
  return instance;
}

const AffineInvariant& ai_geometry() {
  static const AffineInvariant instance;
  return instance;
}

const Geometry& geometry_by_name(std::string_view name) {
  if (name == "bw") return bw_geometry();
  if (name == "ai") return ai_geometry();
  throw InvalidArgument("unknown geometry '" + std::string(name) + "' (expected bw or ai)");
}

}  // namespace psdbw
