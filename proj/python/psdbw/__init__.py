"""Bures-Wasserstein and affine-invariant geometry of PSD matrices.

Matrices are passed as square, symmetric float arrays. Every function takes a
``metric`` of ``"bw"`` (the default) or ``"ai"``.
"""

from ._psdbw import (
    ConvergenceError,
    Error,
    ExpDomainError,
    InvalidArgument,
    NotPdError,
    NotPsdError,
    NumericalError,
    barycenter,
    clip_to_psd,
    distance,
    eigh,
    exp,
    frechet_variance,
    geodesic,
    log,
    pair_mean,
    random_perturbation,
    random_spd,
    sqrt_psd,
    ssd,
)

__all__ = [
    "ConvergenceError",
    "Error",
    "ExpDomainError",
    "InvalidArgument",
    "NotPdError",
    "NotPsdError",
    "NumericalError",
    "barycenter",
    "clip_to_psd",
    "distance",
    "eigh",
    "exp",
    "frechet_variance",
    "geodesic",
    "log",
    "pair_mean",
    "random_perturbation",
    "random_spd",
    "sqrt_psd",
    "ssd",
]
