"""Directional curvature estimates and the multiplicative covariance update.

Along each used direction ``b`` the objective is probed symmetrically
around the mean, giving the second central difference

    h = (f(m + sigma*A*b) + f(m - sigma*A*b) - 2*f(m)) / (sigma**2 * ||b||**2)

which is the exact curvature of a quadratic along ``A b``.  The update
turns these estimates into a symmetric positive definite factor ``G`` that
multiplies the transformation matrix, ``A' = A G``: directions of high
curvature shrink, directions of low curvature grow, and the log-scale
centering keeps ``det(G)`` at one up to the trust-region clip.
"""
from __future__ import annotations

import numpy as np

from ._validation import check_positive
from .sampling import DirectionSet

__all__ = [
    "EvaluationError",
    "estimate_curvatures",
    "compute_G",
    "apply_update",
    "DEFAULT_KAPPA",
    "DEFAULT_ETA_A",
]

DEFAULT_KAPPA = 3.0
DEFAULT_ETA_A = 0.5


class EvaluationError(RuntimeError):
    """An objective evaluation produced a non-finite value."""


def _require_finite(f_m: float, f_plus: np.ndarray, f_minus: np.ndarray) -> None:
    if not (
        np.isfinite(f_m)
        and np.all(np.isfinite(f_plus))
        and np.all(np.isfinite(f_minus))
    ):
        raise EvaluationError("non-finite objective value in mirrored evaluations")


def estimate_curvatures(
    directions: DirectionSet,
    f_m: float,
    f_plus: np.ndarray,
    f_minus: np.ndarray,
    sigma: float,
) -> np.ndarray:
    """Second central difference along every used direction.

    ``f_plus[k]`` and ``f_minus[k]`` are the values at ``m +- sigma*A*b_k``
    for the ``k``-th used direction ``b_k``.  Estimates may be zero or
    negative on non-convex objectives; non-finite inputs raise
    :class:`EvaluationError`.
    """
    sigma = check_positive(sigma, name="sigma")
    f_plus = np.asarray(f_plus, dtype=float)
    f_minus = np.asarray(f_minus, dtype=float)
    if f_plus.shape != (directions.pair_count,) or f_minus.shape != (
        directions.pair_count,
    ):
        raise ValueError("f_plus and f_minus must have one entry per used direction")
    _require_finite(f_m, f_plus, f_minus)
    sq_norms = np.einsum("ij,ij->i", directions.used, directions.used)
    return (f_plus + f_minus - 2.0 * f_m) / (sigma * sigma * sq_norms)


def compute_G(
    directions: DirectionSet,
    f_m: float,
    f_plus: np.ndarray,
    f_minus: np.ndarray,
    sigma: float,
    kappa: float = DEFAULT_KAPPA,
    eta_a: float = DEFAULT_ETA_A,
) -> np.ndarray:
    """Multiplicative update factor from one generation of mirrored values.

    Curvatures are floored at ``max(h) / kappa`` (trust region), log
    transformed, centered to mean zero over the used slots, and damped by
    ``-eta_a / 2``.  Every sampled slot (used or not) then contributes a
    rank-one term ``exp(q) * b b^T / ||b||**2``, averaged over blocks;
    unused slots enter with ``q = 0``.  If no direction shows positive
    curvature the update is skipped and the identity is returned.
    """
    kappa = float(kappa)
    if kappa <= 1.0:
        raise ValueError(f"kappa must exceed 1, got {kappa!r}")
    eta_a = float(eta_a)
    if not 0.0 < eta_a <= 1.0:
        raise ValueError(f"eta_a must lie in (0, 1], got {eta_a!r}")

    h = estimate_curvatures(directions, f_m, f_plus, f_minus, sigma)
    dim = directions.dim
    if np.max(h) <= 0.0:
        return np.eye(dim)

    floor = np.max(h) / kappa
    q = np.log(np.maximum(h, floor))
    q -= q.sum() / directions.pair_count
    q *= -0.5 * eta_a

    all_q = np.zeros(directions.block_count * dim)
    all_q[: directions.pair_count] = q
    V = directions.vectors
    scale = np.exp(all_q) / np.einsum("ij,ij->i", V, V)
    G = (V.T * scale) @ V / directions.block_count
    # exact symmetry despite float round-off in the rank-one accumulation
    return 0.5 * (G + G.T)


def apply_update(A: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Right-multiply the transformation matrix: ``A' = A G``."""
    return A @ G
