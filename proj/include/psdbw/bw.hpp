#pragma once

#include "psdbw/geometry.hpp"

namespace psdbw {

// Bures-Wasserstein geometry on PSD matrices. All inputs are validated as
// PSD within default_psd_tolerance and raise NotPsdError otherwise.

/// [tr(A + B) - 2 tr (A^{1/2} B A^{1/2})^{1/2}]^{1/2}; the radicand is
/// clamped at zero.
double bw_distance(const SymMatrix& a, const SymMatrix& b);

/// (1-t)^2 A + t^2 B + t(1-t) [(AB)^{1/2} + (BA)^{1/2}]. Output is PSD for
/// t in [0, 1]; other t are evaluated by the same formula without checks.
SymMatrix bw_geodesic(const SymMatrix& a, const SymMatrix& b, double t);

/// Wasserstein mean, the geodesic midpoint.
SymMatrix bw_pair_mean(const SymMatrix& a, const SymMatrix& b);

/// (AB)^{1/2} + (BA)^{1/2} - 2A.
TangentVector bw_log(const SymMatrix& a, const SymMatrix& b);

/// Exp map at a positive definite base A = Q diag(l) Q^T:
///
///   exp_A(X) = A + X + Q [(W o X_Q) diag(l) (W o X_Q)] Q^T,
///   W_ij = 1 / (l_i + l_j),  X_Q = Q^T X Q.
///
/// Throws NotPdError if the base is singular and ExpDomainError when
/// I + W o X_Q has an eigenvalue below -tol (the tangent vector then has no
/// preimage under bw_log).
SymMatrix bw_exp(const SymMatrix& a, const TangentVector& x);

/// Q^T A Q for orthogonal Q (checked to ||Q^T Q - I||_F <= 1e-8).
SymMatrix conjugate(const Matrix& q, const SymMatrix& a);

}  // namespace psdbw
