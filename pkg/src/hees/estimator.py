"""Scikit-learn style front end.

The estimator holds hyperparameters only and defers all work to
:meth:`HEES.fit`, so ``get_params``/``set_params``, cloning, and grid
search over hyperparameters behave as for any other estimator.  There is
no ``predict``/``transform``: an optimizer consumes an objective, not a
data matrix, and its product is the fitted minimizer itself.
"""
from __future__ import annotations

import math

from sklearn.base import BaseEstimator

from .core import DEFAULT_COND_LIMIT, DEFAULT_RESTART_BOX, HeesOptimizer

__all__ = ["HEES"]


class HEES(BaseEstimator):
    """Black-box minimizer with curvature-adapted search covariance.

    Parameters mirror :class:`~hees.core.HeesOptimizer` plus the run
    policy (``budget``, ``target_f``, ``ipop``, ``stop_fitness_std``).

    Attributes (after :meth:`fit`)
    ------------------------------
    best_x_ : ndarray
        Best offspring found.
    best_f_ : float
        Its objective value.
    n_evals_ : int
        Objective evaluations consumed.
    termination_reason_ : str
        One of ``target_hit``, ``budget_exhausted``, ``numerical_failure``,
        ``converged``.
    result_ : RunResult
        Full result including per-generation records.
    """

    def __init__(
        self,
        sigma0: float = 1.0,
        m0=None,
        pair_count: int | None = None,
        kappa: float = 3.0,
        eta_a: float = 0.5,
        budget: int = 10_000,
        target_f: float | None = None,
        ipop: bool = False,
        stop_fitness_std: float | None = 1e-9,
        cond_limit: float = DEFAULT_COND_LIMIT,
        restart_box: tuple[float, float] = DEFAULT_RESTART_BOX,
        random_state=None,
    ):
        self.sigma0 = sigma0
        self.m0 = m0
        self.pair_count = pair_count
        self.kappa = kappa
        self.eta_a = eta_a
        self.budget = budget
        self.target_f = target_f
        self.ipop = ipop
        self.stop_fitness_std = stop_fitness_std
        self.cond_limit = cond_limit
        self.restart_box = restart_box
        self.random_state = random_state

    def _resolve_dim(self, objective, dim: int | None) -> int:
        if dim is not None:
            return int(dim)
        obj_dim = getattr(objective, "dim", None)
        if obj_dim is not None:
            return int(obj_dim)
        if self.m0 is not None:
            return len(self.m0)
        raise ValueError(
            "cannot infer the search dimension: pass dim=, use an objective "
            "with a dim attribute, or set m0"
        )

    def fit(self, objective, dim: int | None = None) -> "HEES":
        """Minimize ``objective`` over ``R^dim`` and store the outcome."""
        resolved_dim = self._resolve_dim(objective, dim)
        engine = HeesOptimizer(
            dim=resolved_dim,
            m0=self.m0,
            sigma0=self.sigma0,
            pair_count=self.pair_count,
            kappa=self.kappa,
            eta_a=self.eta_a,
            cond_limit=self.cond_limit,
            restart_box=self.restart_box,
            seed=self.random_state,
        )
        if self.ipop:
            result = engine.ipop_run(
                objective,
                self.budget,
                target_f=self.target_f,
                stop_fitness_std=self.stop_fitness_std,
            )
        else:
            result = engine.run(
                objective,
                self.budget,
                target_f=self.target_f,
                stop_fitness_std=self.stop_fitness_std,
            )
        self.dim_ = resolved_dim
        self.result_ = result
        self.best_x_ = result.best_x
        self.best_f_ = result.best_f if result.best_f is not None else math.inf
        self.n_evals_ = result.evals_used
        self.termination_reason_ = result.termination_reason
        return self
