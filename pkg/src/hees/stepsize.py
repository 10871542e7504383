"""Cumulative step-size adaptation (CSA) for mirrored orthogonal sampling.

The evolution path accumulates the recombination-weighted raw directions
with the usual CSA coefficients, but the path-length normalizer accounts
for mirroring: within an offspring pair the plus and minus weights are
anticorrelated, which shrinks the stationary path variance.  The corrected
variance-effective mass ``mu_eff_mirrored`` restores a unit-variance path
under random selection.  ``g_s`` tracks the exact transient of the path's
expected squared length from a zero start, so no burn-in heuristics are
needed.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_dim, check_positive, check_unit_interval

__all__ = [
    "RecombinationWeights",
    "CsaState",
    "chi_d",
    "mu_eff",
    "mu_eff_mirrored",
    "cs_default",
    "ds_default",
    "update_gs",
    "gs_at_generation",
    "update_path",
    "update_sigma",
    "MAX_LOG_SIGMA_CHANGE",
]

logger = logging.getLogger(__name__)

# Cap on |log(sigma'/sigma)| per generation; larger proposals are clipped.
MAX_LOG_SIGMA_CHANGE = 1.0

# Pole guard for the mirrored correction (denominator -> 0 for equal weights).
_POLE_TOL = 1e-12


def chi_d(dim: int) -> float:
    """Expected norm of a ``dim``-dimensional standard normal vector
    (series approximation ``sqrt(d) * (1 - 1/(4d) + 1/(21 d^2))``)."""
    dim = check_dim(dim)
    return math.sqrt(dim) * (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim * dim))


def mu_eff(weights) -> float:
    """Variance-effective selection mass ``1 / sum(w_i**2)`` of weights
    summing to one."""
    w = np.asarray(weights, dtype=float)
    return 1.0 / float(np.sum(w * w))


def mu_eff_mirrored(mu_eff_value: float, pair_count: int) -> float:
    """Path-length normalizer corrected for within-pair anticorrelation.

    ``mu_eff / (1 - (mu_eff - 1) / (2*pair_count - 1))``; diverges as the
    weights approach uniformity, so that case is rejected.
    """
    pair_count = check_dim(pair_count, name="pair_count")
    denom = 1.0 - (mu_eff_value - 1.0) / (2 * pair_count - 1)
    if denom <= _POLE_TOL:
        raise ValueError(
            "weights too close to uniform: the mirrored path correction diverges"
        )
    return mu_eff_value / denom


def cs_default(dim: int, mu_eff_value: float) -> float:
    """Default path smoothing rate ``(mu_eff + 2) / (dim + mu_eff + 5)``."""
    return (mu_eff_value + 2.0) / (dim + mu_eff_value + 5.0)


def ds_default(dim: int, mu_eff_value: float, c_s: float) -> float:
    """Default damping ``1 + 2*max(0, sqrt((mu_eff-1)/(dim+1)) - 1) + c_s``."""
    return 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff_value - 1.0) / (dim + 1.0)) - 1.0) + c_s


@dataclass(frozen=True)
class RecombinationWeights:
    """Nonincreasing, nonnegative weights over ``2 * pair_count`` ranked
    offspring, summing to one, with the derived effective masses."""

    w: np.ndarray
    pair_count: int
    mu_eff: float
    mu_eff_mirrored: float

    @classmethod
    def from_weights(cls, weights, pair_count: int) -> "RecombinationWeights":
        pair_count = check_dim(pair_count, name="pair_count")
        w = np.asarray(weights, dtype=float)
        if w.shape != (2 * pair_count,):
            raise ValueError(
                f"expected {2 * pair_count} weights for {pair_count} mirrored "
                f"pairs, got shape {w.shape}"
            )
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        if np.any(np.diff(w) > 0.0):
            raise ValueError("weights must be nonincreasing in rank")
        total = float(w.sum())
        if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise ValueError(f"weights must sum to 1, got {total!r}")
        w = w / total
        m = mu_eff(w)
        return cls(
            w=w,
            pair_count=pair_count,
            mu_eff=m,
            mu_eff_mirrored=mu_eff_mirrored(m, pair_count),
        )

    @classmethod
    def defaults(cls, pair_count: int) -> "RecombinationWeights":
        """Log-rank weights over the better half of ``2 * pair_count``
        offspring: ``w_i
        proportional to ln(pair_count + 1/2) - ln(i)`` for
        ``i <= pair_count``, zero beyond."""
        pair_count = check_dim(pair_count, name="pair_count")
        ranks = np.arange(1, 2 * pair_count + 1, dtype=float)
        raw = np.maximum(0.0, math.log(pair_count + 0.5) - np.log(ranks))
        return cls.from_weights(raw / raw.sum(), pair_count)


@dataclass(frozen=True)
class CsaState:
    """Evolution-path state: path ``p_s``, its expected squared-length
    transient ``g_s``, and the current step size."""

    p_s: np.ndarray
    g_s: float
    sigma: float

    @classmethod
    def initial(cls, dim: int, sigma0: float) -> "CsaState":
        return cls(
            p_s=np.zeros(check_dim(dim)),
            g_s=0.0,
            sigma=check_positive(sigma0, name="sigma0"),
        )


def update_gs(g_s: float, c_s: float) -> float:
    """One-step recursion ``g' = (1 - c_s)**2 * g + c_s * (2 - c_s)``."""
    c_s = check_unit_interval(c_s, name="c_s")
    return (1.0 - c_s) ** 2 * g_s + c_s * (2.0 - c_s)


def gs_at_generation(t: int, c_s: float) -> float:
    """Closed form of the recursion from ``g_s = 0``:
    ``g_s(t) = 1 - (1 - c_s)**(2 t)``."""
    return 1.0 - (1.0 - c_s) ** (2 * t)


def update_path(
    p_s: np.ndarray,
    c_s: float,
    mu_eff_mirrored_value: float,
    weighted_direction_sum: np.ndarray,
) -> np.ndarray:
    """Smooth the recombination-weighted direction sum into the path.

    ``weighted_direction_sum`` is ``sum_k (w_k_plus - w_k_minus) * b_k``
    over the used raw directions of the generation.
    """
    c_s = check_unit_interval(c_s, name="c_s")
    gain = math.sqrt(c_s * (2.0 - c_s) * mu_eff_mirrored_value)
    return (1.0 - c_s) * p_s + gain * weighted_direction_sum


def update_sigma(
    sigma: float,
    p_s_new: np.ndarray,
    g_s_new: float,
    c_s: float,
    d_s: float,
    chi: float,
) -> float:
    """Multiplicative step-size update from the path length.

    ``sigma' = sigma * exp((c_s / d_s) * (||p_s'|| / chi - sqrt(g_s')))``.
    The exponent is clipped to ``+-MAX_LOG_SIGMA_CHANGE`` with a warning;
    a proposal that extreme signals a degenerate generation rather than
    useful signal.
    """
    sigma = check_positive(sigma, name="sigma")
    d_s = check_positive(d_s, name="d_s")
    exponent = (c_s / d_s) * (float(np.linalg.norm(p_s_new)) / chi - math.sqrt(g_s_new))
    if abs(exponent) > MAX_LOG_SIGMA_CHANGE:
        logger.warning(
            "step-size exponent %.3g exceeds +-%.3g; clipping",
            exponent,
            MAX_LOG_SIGMA_CHANGE,
        )
        exponent = math.copysign(MAX_LOG_SIGMA_CHANGE, exponent)
    return sigma * math.exp(exponent)
