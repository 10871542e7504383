"""Random orthogonal direction blocks for mirrored sampling.

A block is produced by drawing ``d`` standard Gaussian vectors, recording
their lengths, orthonormalizing them with modified Gram-Schmidt, and then
rescaling each unit vector back to the length of the corresponding raw
draw.  The resulting frame is uniformly distributed over the orthogonal
group while every squared vector length keeps its chi-squared(d)
distribution, so second moments match plain Gaussian sampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_generator, check_dim, check_positive

__all__ = [
    "DirectionSet",
    "sample_orthogonal",
    "sample_direction_blocks",
    "random_rotation",
]

# A Gram-Schmidt residual below this fraction of the raw draw's length
# counts as numerically degenerate and forces a redraw of the whole block.
DEGENERACY_TOL = 1e-12


def _orthogonalize(Z: np.ndarray, norms: np.ndarray) -> np.ndarray | None:
    """Modified Gram-Schmidt on the rows of ``Z``; ``None`` on degeneracy."""
    Q = Z.copy()
    for i in range(Q.shape[0]):
        v = Q[i]
        for j in range(i):
            v -= (Q[j] @ v) * Q[j]
        r = float(np.linalg.norm(v))
        if not r > DEGENERACY_TOL * norms[i]:
            return None
        v /= r
    return Q


def sample_orthogonal(dim: int, rng) -> np.ndarray:
    """Draw one block of ``dim`` pairwise-orthogonal direction vectors.

    Returns a ``(dim, dim)`` array whose rows are mutually orthogonal and
    whose ``i``-th row has the Euclidean norm of the ``i``-th raw Gaussian
    draw.  Degenerate draws (a numerically zero vector, or a Gram-Schmidt
    residual below ``DEGENERACY_TOL`` times the raw length) discard the
    whole block and redraw, which keeps the frame distribution exactly
    uniform.
    """
    dim = check_dim(dim)
    rng = as_generator(rng)
    while True:
        Z = rng.standard_normal((dim, dim))
        norms = np.linalg.norm(Z, axis=1)
        if not np.all(norms > 0.0):
            continue
        Q = _orthogonalize(Z, norms)
        if Q is not None:
            return Q * norms[:, None]


@dataclass(frozen=True)
class DirectionSet:
    """All direction vectors of one generation, in block-major order.

    ``vectors`` stacks ``block_count`` independent orthogonal blocks of
    ``dim`` rows each.  The first ``pair_count`` rows are the *used*
    directions (each spawns a mirrored offspring pair); the remaining rows
    complete the final block and only contribute the neutral part of the
    covariance update.
    """

    dim: int
    pair_count: int
    block_count: int
    vectors: np.ndarray

    def __post_init__(self) -> None:
        expected = (self.block_count * self.dim, self.dim)
        if self.vectors.shape != expected:
            raise ValueError(
                f"vectors must have shape {expected}, got {self.vectors.shape}"
            )
        if not self.pair_count <= self.block_count * self.dim:
            raise ValueError("pair_count exceeds the sampled slots")

    @property
    def used(self) -> np.ndarray:
        """Directions that generate offspring, shape ``(pair_count, dim)``."""
        return self.vectors[: self.pair_count]

    @property
    def unused(self) -> np.ndarray:
        """Fill-up directions of the final block, possibly empty."""
        return self.vectors[self.pair_count :]


def sample_direction_blocks(dim: int, pair_count: int, rng) -> DirectionSet:
    """Sample ``ceil(pair_count / dim)`` orthogonal blocks of directions."""
    dim = check_dim(dim)
    pair_count = check_dim(pair_count, name="pair_count")
    rng = as_generator(rng)
    block_count = math.ceil(pair_count / dim)
    vectors = np.concatenate(
        [sample_orthogonal(dim, rng) for _ in range(block_count)], axis=0
    )
    return DirectionSet(
        dim=dim, pair_count=pair_count, block_count=block_count, vectors=vectors
    )


def random_rotation(dim: int, rng) -> np.ndarray:
    """Orthogonal ``(dim, dim)`` matrix drawn uniformly (Haar) via a
    normalized orthogonal block."""
    Y = sample_orthogonal(dim, rng)
    return Y / np.linalg.norm(Y, axis=1)[:, None]


def scaled_steps(vectors: np.ndarray, A: np.ndarray, sigma: float) -> np.ndarray:
    """Map raw directions ``b`` to search-space steps ``sigma * A b``, row-wise."""
    sigma = check_positive(sigma, name="sigma")
    return sigma * (vectors @ A.T)
