"""Benchmark objectives: convex quadratics, two classic non-convex
functions, and two monotone transformations of the sphere that stress
curvature estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._validation import as_generator, check_dim, check_square_matrix, check_vector
from .sampling import random_rotation

__all__ = [
    "ObjectiveProblem",
    "make_quadratic",
    "sphere",
    "ellipsoid",
    "discus",
    "cigar",
    "make_rosenbrock",
    "make_rastrigin",
    "log_sphere",
    "rugged_sphere",
    "rugged_transform",
    "make_problem",
    "problem_names",
]


@dataclass(frozen=True)
class ObjectiveProblem:
    """A minimization problem over ``R^dim``.

    ``x_star``/``f_star`` are the known optimum and value when available
    (``f_star`` is omitted when the infimum is not attained), ``gradient``
    an optional analytic gradient.  Instances are callable.
    """

    name: str
    dim: int
    evaluate: Callable[[np.ndarray], float]
    x_star: np.ndarray | None = None
    f_star: float | None = None
    gradient: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        check_dim(self.dim)
        if self.x_star is not None:
            check_vector(self.x_star, self.dim, name="x_star")
            if self.f_star is not None:
                value = float(self.evaluate(self.x_star))
                tol = 1e-12 * max(1.0, abs(self.f_star))
                if not abs(value - self.f_star) <= tol:
                    raise ValueError(
                        f"objective {self.name!r}: evaluate(x_star) = {value!r} "
                        f"does not match f_star = {self.f_star!r}"
                    )

    def __call__(self, x) -> float:
        return float(self.evaluate(x))


def make_quadratic(
    H,
    x_star=None,
    rotation=None,
    name: str = "quadratic",
) -> ObjectiveProblem:
    """Convex quadratic ``f(x) = 0.5 (x - x*)^T M (x - x*)`` with
    ``M = R^T H R`` for an optional orthogonal ``R``."""
    H = np.asarray(H, dtype=float)
    dim = H.shape[0]
    H = check_square_matrix(H, dim, name="H")
    if not np.allclose(H, H.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(H).max()))):
        raise ValueError("H must be symmetric")
    try:
        np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        raise ValueError("H must be positive definite") from None
    if rotation is not None:
        R = check_square_matrix(rotation, dim, name="rotation")
        if not np.allclose(R @ R.T, np.eye(dim), rtol=0.0, atol=1e-10):
            raise ValueError("rotation must be orthogonal")
        M = R.T @ H @ R
        M = 0.5 * (M + M.T)
    else:
        M = H
    x_star = np.zeros(dim) if x_star is None else check_vector(x_star, dim, name="x_star")

    def evaluate(x):
        delta = np.asarray(x, dtype=float) - x_star
        return 0.5 * float(delta @ M @ delta)

    def gradient(x):
        return M @ (np.asarray(x, dtype=float) - x_star)

    return ObjectiveProblem(
        name=name, dim=dim, evaluate=evaluate, x_star=x_star, f_star=0.0, gradient=gradient
    )


def _instance_rotation(dim: int, instance_seed) -> np.ndarray | None:
    if instance_seed is None:
        return None
    return random_rotation(dim, as_generator(instance_seed))


def sphere(dim: int) -> ObjectiveProblem:
    """``0.5 ||x||^2``; every direction has unit curvature."""
    return make_quadratic(np.eye(check_dim(dim)), name="sphere")


def ellipsoid(dim: int, instance_seed=None) -> ObjectiveProblem:
    """Axis curvatures spread geometrically from 1 to 1e6."""
    dim = check_dim(dim)
    if dim == 1:
        diag = np.ones(1)
    else:
        diag = 10.0 ** (6.0 * np.arange(dim) / (dim - 1))
    return make_quadratic(
        np.diag(diag), rotation=_instance_rotation(dim, instance_seed), name="ellipsoid"
    )


def discus(dim: int, instance_seed=None) -> ObjectiveProblem:
    """One stiff axis (curvature 1e6), all others unit."""
    dim = check_dim(dim)
    diag = np.ones(dim)
    diag[0] = 1e6
    return make_quadratic(
        np.diag(diag), rotation=_instance_rotation(dim, instance_seed), name="discus"
    )


def cigar(dim: int, instance_seed=None) -> ObjectiveProblem:
    """One soft axis (curvature 1), all others 1e6."""
    dim = check_dim(dim)
    diag = np.full(dim, 1e6)
    diag[0] = 1.0
    return make_quadratic(
        np.diag(diag), rotation=_instance_rotation(dim, instance_seed), name="cigar"
    )


def make_rosenbrock(dim: int) -> ObjectiveProblem:
    """Banana valley ``sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2``;
    optimum at the all-ones vector."""
    dim = check_dim(dim)
    if dim < 2:
        raise ValueError("rosenbrock requires dim >= 2")

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return float(
            np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2)
        )

    def gradient(x):
        x = np.asarray(x, dtype=float)
        g = np.zeros_like(x)
        valley = x[1:] - x[:-1] ** 2
        g[:-1] += -400.0 * x[:-1] * valley - 2.0 * (1.0 - x[:-1])
        g[1:] += 200.0 * valley
        return g

    return ObjectiveProblem(
        name="rosenbrock",
        dim=dim,
        evaluate=evaluate,
        x_star=np.ones(dim),
        f_star=0.0,
        gradient=gradient,
    )


def make_rastrigin(dim: int) -> ObjectiveProblem:
    """Highly multimodal ``10 d + sum x_i^2 - 10 cos(2 pi x_i)``."""
    dim = check_dim(dim)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return float(10.0 * dim + np.sum(x * x - 10.0 * np.cos(2.0 * math.pi * x)))

    def gradient(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x + 20.0 * math.pi * np.sin(2.0 * math.pi * x)

    return ObjectiveProblem(
        name="rastrigin",
        dim=dim,
        evaluate=evaluate,
        x_star=np.zeros(dim),
        f_star=0.0,
        gradient=gradient,
    )


def log_sphere(dim: int) -> ObjectiveProblem:
    """``log(0.5 ||x||^2)``: sphere level sets, unbounded below at the
    origin.  The exact origin maps to the most negative finite float."""
    dim = check_dim(dim)

    def evaluate(x):
        s = 0.5 * float(np.sum(np.asarray(x, dtype=float) ** 2))
        if s == 0.0:
            return -np.finfo(float).max
        return math.log(s)

    return ObjectiveProblem(
        name="log_sphere", dim=dim, evaluate=evaluate, x_star=np.zeros(dim)
    )


def rugged_transform(t: float) -> float:
    """Oscillating monotone warp of a nonnegative level value.

    ``exp((1/4 - cos(pi * (5 ln t - r)) / 2 + r) / 5)`` with
    ``r = floor(5 ln t)``; the floor jumps cancel against the cosine
    phase, so the map is continuous and strictly increasing with
    ``rugged_transform(0) = 0`` as the limit value.  Negative input is a
    domain error.
    """
    t = float(t)
    if t < 0.0:
        raise ValueError(f"rugged transform requires t >= 0, got {t!r}")
    if t == 0.0:
        return 0.0
    u = 5.0 * math.log(t)
    r = math.floor(u)
    return math.exp((0.25 - 0.5 * math.cos(math.pi * (u - r)) + r) / 5.0)


def rugged_sphere(dim: int) -> ObjectiveProblem:
    """Sphere level sets passed through the rugged warp: monotone in the
    large but with strongly varying local slope."""
    dim = check_dim(dim)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return rugged_transform(0.5 * float(np.sum(x * x)))

    return ObjectiveProblem(
        name="rugged_sphere",
        dim=dim,
        evaluate=evaluate,
        x_star=np.zeros(dim),
        f_star=0.0,
    )


_FACTORIES: dict[str, Callable[[int, object], ObjectiveProblem]] = {
    "sphere": lambda dim, seed: sphere(dim),
    "ellipsoid": lambda dim, seed: ellipsoid(dim, instance_seed=seed),
    "discus": lambda dim, seed: discus(dim, instance_seed=seed),
    "cigar": lambda dim, seed: cigar(dim, instance_seed=seed),
    "rosenbrock": lambda dim, seed: make_rosenbrock(dim),
    "rastrigin": lambda dim, seed: make_rastrigin(dim),
    "log_sphere": lambda dim, seed: log_sphere(dim),
    "rugged_sphere": lambda dim, seed: rugged_sphere(dim),
}


def problem_names() -> tuple[str, ...]:
    return tuple(sorted(_FACTORIES))


def make_problem(name: str, dim: int, instance_seed=None) -> ObjectiveProblem:
    """Look up a benchmark function by name.

    ``instance_seed`` draws a random rotation for the anisotropic
    quadratics (ellipsoid, discus, cigar) and is ignored by the
    rotation-invariant or separable-by-construction functions.
    """
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown objective {name!r}; choose from {', '.join(problem_names())}"
        ) from None
    return factory(dim, instance_seed)
