"""Small input-validation helpers shared across the package."""
from __future__ import annotations

import numbers

import numpy as np

__all__ = [
    "check_dim",
    "check_positive",
    "check_unit_interval",
    "check_vector",
    "check_square_matrix",
    "as_generator",
]


def check_dim(dim: int, *, name: str = "dim") -> int:
    if not isinstance(dim, numbers.Integral) or dim < 1:
        raise ValueError(f"{name} must be a positive integer, got {dim!r}")
    return int(dim)


def check_positive(value: float, *, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")
    return value


def check_unit_interval(value: float, *, name: str, open_left: bool = True) -> float:
    """Validate a rate in (0, 1] (or [0, 1] with open_left=False)."""
    value = float(value)
    low_ok = value > 0.0 if open_left else value >= 0.0
    if not (low_ok and value <= 1.0):
        left = "(" if open_left else "["
        raise ValueError(f"{name} must lie in {left}0, 1], got {value!r}")
    return value


def check_vector(x, dim: int, *, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise ValueError(f"{name} must have shape ({dim},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} must be finite")
    return x


def check_square_matrix(A, dim: int, *, name: str) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape != (dim, dim):
        raise ValueError(f"{name} must have shape ({dim}, {dim}), got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} must be finite")
    return A


def as_generator(seed) -> np.random.Generator:
    """Coerce None, an int seed, or an existing Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
