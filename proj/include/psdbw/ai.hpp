#pragma once

#include "psdbw/geometry.hpp"

namespace psdbw {

// Affine-invariant geometry on positive definite matrices. Every matrix
// function is evaluated eigenvalue-wise on A^{-1/2} B A^{-1/2}. Inputs with
// zero eigenvalues must be regularized by the caller (clip_to_psd).

double ai_distance(const SymMatrix& a, const SymMatrix& b);
SymMatrix ai_geodesic(const SymMatrix& a, const SymMatrix& b, double t);
SymMatrix ai_pair_mean(const SymMatrix& a, const SymMatrix& b);
TangentVector ai_log(const SymMatrix& a, const SymMatrix& b);
SymMatrix ai_exp(const SymMatrix& a, const TangentVector& x);

}  // namespace psdbw
