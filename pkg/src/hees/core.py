"""Generation loop of the curvature-adapted evolution strategy.

Each generation samples orthogonal direction blocks, evaluates the mean
and a mirrored offspring pair per used direction, updates the
transformation matrix multiplicatively from the curvature estimates,
recombines the ranked offspring into a new mean, and adapts the step size
by CSA.  The matrix update uses the generation's own evaluations and the
*current* mean and step size; the mean and step-size updates follow.

A single optimizer instance is single-threaded and owns its random
generator; separate instances with separate seeds are fully independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import (
    as_generator,
    check_dim,
    check_positive,
    check_square_matrix,
    check_vector,
)
from .curvature import (
    DEFAULT_ETA_A,
    DEFAULT_KAPPA,
    EvaluationError,
    apply_update,
    compute_G,
)
from .sampling import sample_direction_blocks
from .stepsize import (
    CsaState,
    RecombinationWeights,
    chi_d,
    cs_default,
    ds_default,
    update_gs,
    update_path,
    update_sigma,
)

__all__ = [
    "TERMINATION_REASONS",
    "default_pair_count",
    "rank_and_weight",
    "condition_number",
    "OptimizerState",
    "GenerationRecord",
    "RunResult",
    "HeesOptimizer",
]

TERMINATION_REASONS = (
    "target_hit",
    "budget_exhausted",
    "numerical_failure",
    "converged",
)

DEFAULT_COND_LIMIT = 1e14
DEFAULT_RESTART_BOX = (-4.0, 4.0)


def default_pair_count(dim: int) -> int:
    """Default number of mirrored pairs per generation,
    ``2 + floor(1.5 * ln(dim))``."""
    return 2 + math.floor(1.5 * math.log(check_dim(dim)))


def condition_number(A: np.ndarray) -> float:
    """Condition number of the search covariance ``C = A^T A``, i.e. the
    squared singular-value ratio of ``A``; ``inf`` when singular."""
    s = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    if not np.all(np.isfinite(s)) or s[-1] == 0.0:
        return math.inf
    return float((s[0] / s[-1]) ** 2)


def rank_and_weight(f_values, weights: RecombinationWeights) -> np.ndarray:
    """Assign rank-based weights to offspring in evaluation order.

    The sort is stable and ascending, so equal fitness values keep their
    evaluation order: within a tied mirrored pair the plus member outranks
    the minus member, and earlier pairs outrank later ones.
    """
    f = np.asarray(f_values, dtype=float)
    if f.shape != weights.w.shape:
        raise ValueError(
            f"expected {weights.w.shape[0]} fitness values, got shape {f.shape}"
        )
    if not np.all(np.isfinite(f)):
        raise ValueError("fitness values must be finite for ranking")
    order = np.argsort(f, kind="stable")
    assigned = np.empty_like(weights.w)
    assigned[order] = weights.w
    return assigned


@dataclass(frozen=True)
class OptimizerState:
    """Full strategy state after ``t`` generations."""

    m: np.ndarray
    A: np.ndarray
    csa: CsaState
    t: int
    evals: int
    pair_count: int

    @property
    def sigma(self) -> float:
        return self.csa.sigma


@dataclass(frozen=True)
class GenerationRecord:
    """Per-generation trace row (values after the generation's updates).

    ``best_x`` is kept in memory for result reporting but is not part of
    the serialized trace schema.
    """

    t: int
    evals: int
    f_m: float
    best_f: float
    best_f_so_far: float
    sigma: float
    cond_C: float
    fitness_std: float
    restart_index: int = 0
    dist_to_opt: float = math.nan
    best_x: np.ndarray | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class RunResult:
    """Outcome of a (possibly restarted) optimization run."""

    best_x: np.ndarray | None
    best_f: float
    evals_used: int
    termination_reason: str
    records: list[GenerationRecord]
    restart_count: int = 0


@dataclass(frozen=True)
class _StrategyParams:
    """Population-size dependent constants."""

    weights: RecombinationWeights
    c_s: float
    d_s: float
    chi: float


@dataclass
class _Best:
    f: float = math.inf
    x: np.ndarray | None = None

    def consider(self, f: float, x: np.ndarray | None) -> None:
        if f < self.f:
            self.f = f
            self.x = x


class HeesOptimizer:
    """Curvature-adapted evolution strategy over ``R^dim``.

    Parameters
    ----------
    dim:
        Search-space dimension.
    m0:
        Initial mean; drawn uniformly from ``restart_box`` when omitted.
    sigma0:
        Initial step size (default 1.0).
    A0:
        Initial transformation matrix (default identity).
    pair_count:
        Mirrored pairs per generation; default ``2 + floor(1.5 ln dim)``.
    kappa:
        Curvature trust-region ratio (> 1, default 3).
    eta_a:
        Matrix learning rate in ``(0, 1]`` (default 0.5).
    weights:
        Recombination weights for the initial population size, either a
        :class:`RecombinationWeights` or a raw vector of length
        ``2 * pair_count``.  Restarted populations always use the default
        log-rank weights for their doubled size.
    c_s, d_s:
        CSA smoothing rate and damping; explicit values override the
        population-size defaults for every population size.
    cond_limit:
        Abort threshold on the condition number of ``A`` (default 1e14).
    restart_box:
        Interval whose Cartesian power supplies fresh means (default
        ``(-4, 4)``).
    seed:
        Seed or :class:`numpy.random.Generator` for all sampling.
    """

    def __init__(
        self,
        dim: int,
        m0=None,
        sigma0: float = 1.0,
        A0=None,
        pair_count: int | None = None,
        kappa: float = DEFAULT_KAPPA,
        eta_a: float = DEFAULT_ETA_A,
        weights=None,
        c_s: float | None = None,
        d_s: float | None = None,
        cond_limit: float = DEFAULT_COND_LIMIT,
        restart_box: tuple[float, float] = DEFAULT_RESTART_BOX,
        seed=None,
    ):
        self.dim = check_dim(dim)
        self.sigma0 = check_positive(sigma0, name="sigma0")
        self.m0 = None if m0 is None else check_vector(m0, self.dim, name="m0")
        self.A0 = (
            np.eye(self.dim)
            if A0 is None
            else check_square_matrix(A0, self.dim, name="A0")
        )
        self.pair_count = (
            default_pair_count(self.dim)
            if pair_count is None
            else check_dim(pair_count, name="pair_count")
        )
        if not float(kappa) > 1.0:
            raise ValueError(f"kappa must exceed 1, got {kappa!r}")
        self.kappa = float(kappa)
        if not 0.0 < float(eta_a) <= 1.0:
            raise ValueError(f"eta_a must lie in (0, 1], got {eta_a!r}")
        self.eta_a = float(eta_a)
        self.cond_limit = check_positive(cond_limit, name="cond_limit")
        lo, hi = (float(restart_box[0]), float(restart_box[1]))
        if not lo < hi:
            raise ValueError(f"restart_box must be an interval, got {restart_box!r}")
        self.restart_box = (lo, hi)
        self.rng = as_generator(seed)

        if weights is None:
            initial_weights = RecombinationWeights.defaults(self.pair_count)
        elif isinstance(weights, RecombinationWeights):
            if weights.pair_count != self.pair_count:
                raise ValueError(
                    "weights were built for a different number of mirrored pairs"
                )
            initial_weights = weights
        else:
            initial_weights = RecombinationWeights.from_weights(
                weights, self.pair_count
            )
        self._cs_override = None if c_s is None else float(c_s)
        self._ds_override = None if d_s is None else float(d_s)
        self._params_cache: dict[int, _StrategyParams] = {
            self.pair_count: self._build_params(initial_weights)
        }

    # -- parameter sets -------------------------------------------------

    def _build_params(self, weights: RecombinationWeights) -> _StrategyParams:
        c_s = (
            self._cs_override
            if self._cs_override is not None
            else cs_default(self.dim, weights.mu_eff)
        )
        d_s = (
            self._ds_override
            if self._ds_override is not None
            else ds_default(self.dim, weights.mu_eff, c_s)
        )
        return _StrategyParams(weights=weights, c_s=c_s, d_s=d_s, chi=chi_d(self.dim))

    def params_for(self, pair_count: int) -> _StrategyParams:
        """Constants for a given population size (cached; restarts use
        default weights)."""
        params = self._params_cache.get(pair_count)
        if params is None:
            params = self._build_params(RecombinationWeights.defaults(pair_count))
            self._params_cache[pair_count] = params
        return params

    # -- state construction ---------------------------------------------

    def _draw_mean(self) -> np.ndarray:
        lo, hi = self.restart_box
        return self.rng.uniform(lo, hi, size=self.dim)

    def initial_state(self) -> OptimizerState:
        """Fresh state from the configured ``m0``/``sigma0``/``A0``."""
        m = self._draw_mean() if self.m0 is None else self.m0.copy()
        return OptimizerState(
            m=m,
            A=self.A0.copy(),
            csa=CsaState.initial(self.dim, self.sigma0),
            t=0,
            evals=0,
            pair_count=self.pair_count,
        )

    def _restart_state(
        self, state: OptimizerState, pair_count: int, m: np.ndarray
    ) -> OptimizerState:
        """Fresh strategy state that keeps the global counters."""
        return OptimizerState(
            m=m,
            A=np.eye(self.dim),
            csa=CsaState.initial(self.dim, self.sigma0),
            t=state.t,
            evals=state.evals,
            pair_count=pair_count,
        )

    # -- one generation --------------------------------------------------

    def step(self, state: OptimizerState, objective) -> tuple[OptimizerState, GenerationRecord]:
        """Advance one generation; returns the new state and its record.

        Raises :class:`EvaluationError` if any of the ``2 * pair_count + 1``
        evaluations is non-finite.  The state is immutable, so a failed
        step leaves the caller's state untouched.
        """
        params = self.params_for(state.pair_count)
        directions = sample_direction_blocks(self.dim, state.pair_count, self.rng)
        steps = state.sigma * (directions.used @ state.A.T)
        x_plus = state.m + steps
        x_minus = state.m - steps

        f_m = float(objective(state.m))
        f_plus = np.array([float(objective(x)) for x in x_plus])
        f_minus = np.array([float(objective(x)) for x in x_minus])
        n_offspring = 2 * state.pair_count
        evals = state.evals + n_offspring + 1

        # matrix update first, from the current mean and step size
        G = compute_G(
            directions, f_m, f_plus, f_minus, state.sigma, self.kappa, self.eta_a
        )
        A_new = apply_update(state.A, G)

        # rank the mirrored offspring in evaluation order (plus before minus)
        f_all = np.empty(n_offspring)
        f_all[0::2] = f_plus
        f_all[1::2] = f_minus
        if not np.all(np.isfinite(f_all)):
            raise EvaluationError("non-finite offspring fitness")
        assigned = rank_and_weight(f_all, params.weights)
        m_new = assigned[0::2] @ x_plus + assigned[1::2] @ x_minus

        g_new = update_gs(state.csa.g_s, params.c_s)
        direction_sum = (assigned[0::2] - assigned[1::2]) @ directions.used
        p_new = update_path(
            state.csa.p_s, params.c_s, params.weights.mu_eff_mirrored, direction_sum
        )
        sigma_new = update_sigma(
            state.sigma, p_new, g_new, params.c_s, params.d_s, params.chi
        )

        best_idx = int(np.argmin(f_all))
        best_x = (x_plus if best_idx % 2 == 0 else x_minus)[best_idx // 2].copy()
        x_star = getattr(objective, "x_star", None)
        dist = math.nan if x_star is None else float(np.linalg.norm(m_new - x_star))

        new_state = OptimizerState(
            m=m_new,
            A=A_new,
            csa=CsaState(p_s=p_new, g_s=g_new, sigma=sigma_new),
            t=state.t + 1,
            evals=evals,
            pair_count=state.pair_count,
        )
        record = GenerationRecord(
            t=new_state.t,
            evals=evals,
            f_m=f_m,
            best_f=float(f_all[best_idx]),
            best_f_so_far=float(f_all[best_idx]),
            sigma=sigma_new,
            cond_C=condition_number(A_new),
            fitness_std=float(np.std(f_all)),
            dist_to_opt=dist,
            best_x=best_x,
        )
        return new_state, record

    # -- run loops --------------------------------------------------------

    def _generation_cost(self, pair_count: int) -> int:
        return 2 * pair_count + 1

    def _segment(
        self,
        objective,
        state: OptimizerState,
        budget: int,
        target_f: float,
        stop_fitness_std: float,
        best: _Best,
        records: list[GenerationRecord],
        restart_index: int,
    ) -> tuple[str, OptimizerState]:
        """Advance until a stop fires or the next generation no longer
        fits the global evaluation budget."""
        cost = self._generation_cost(state.pair_count)
        while state.evals + cost <= budget:
            try:
                state, rec = self.step(state, objective)
            except EvaluationError:
                # the failed generation's evaluations were genuinely spent
                state = replace(state, t=state.t + 1, evals=state.evals + cost)
                return "numerical_failure", state
            best.consider(rec.best_f, rec.best_x)
            rec = replace(rec, best_f_so_far=best.f, restart_index=restart_index)
            records.append(rec)
            if best.f <= target_f:
                return "target_hit", state
            if rec.cond_C > self.cond_limit**2:
                return "numerical_failure", state
            if rec.fitness_std < stop_fitness_std:
                return "converged", state
        return "budget_exhausted", state

    def _check_budget(self, budget: int) -> int:
        budget = int(budget)
        cost = self._generation_cost(self.pair_count)
        if budget < cost:
            raise ValueError(
                f"budget must cover at least one generation "
                f"({cost} evaluations), got {budget}"
            )
        return budget

    def run(
        self,
        objective,
        budget: int,
        target_f: float | None = None,
        stop_fitness_std: float | None = 1e-9,
    ) -> RunResult:
        """Single run until target, budget, flat fitness, or failure.

        ``stop_fitness_std`` halts the run with reason ``"converged"``
        once the offspring fitness standard deviation falls below it;
        pass 0 or ``None`` to disable (required for targets much below
        the default 1e-9 threshold, since near an optimum the fitness
        spread scales with the fitness level itself).
        """
        budget = self._check_budget(budget)
        target = -math.inf if target_f is None else float(target_f)
        stop_std = 0.0 if stop_fitness_std is None else float(stop_fitness_std)
        best = _Best()
        records: list[GenerationRecord] = []
        state = self.initial_state()
        reason, state = self._segment(
            objective, state, budget, target, stop_std, best, records, 0
        )
        return RunResult(
            best_x=best.x,
            best_f=best.f,
            evals_used=state.evals,
            termination_reason=reason,
            records=records,
            restart_count=0,
        )

    def ipop_run(
        self,
        objective,
        budget: int,
        target_f: float | None = None,
        m_sampler=None,
        stop_fitness_std: float | None = 1e-9,
    ) -> RunResult:
        """Restarted run: each flat-fitness stop doubles the number of
        mirrored pairs and restarts from a fresh mean.

        ``m_sampler(rng) -> vector`` supplies fresh means; the default
        draws uniformly from ``restart_box``.  Restarts reset the step
        size to ``sigma0`` and the matrix to the identity, and are only
        started while the remaining budget covers at least one generation
        of the doubled population.
        """
        budget = self._check_budget(budget)
        target = -math.inf if target_f is None else float(target_f)
        stop_std = 1e-9 if stop_fitness_std is None else float(stop_fitness_std)
        best = _Best()
        records: list[GenerationRecord] = []
        state = self.initial_state()
        restart_index = 0
        while True:
            reason, state = self._segment(
                objective, state, budget, target, stop_std, best, records, restart_index
            )
            if reason != "converged":
                break
            doubled = 2 * state.pair_count
            if state.evals + self._generation_cost(doubled) > budget:
                reason = "budget_exhausted"
                break
            m = (
                self._draw_mean()
                if m_sampler is None
                else check_vector(m_sampler(self.rng), self.dim, name="m_sampler value")
            )
            state = self._restart_state(state, doubled, m)
            restart_index += 1
        return RunResult(
            best_x=best.x,
            best_f=best.f,
            evals_used=state.evals,
            termination_reason=reason,
            records=records,
            restart_count=restart_index,
        )
