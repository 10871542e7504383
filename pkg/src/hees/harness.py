"""Experiment harness: batched seeded runs, CSV trace persistence, and
ECDF / median-trajectory aggregation over a run directory."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import GenerationRecord, HeesOptimizer, RunResult, condition_number
from .objectives import make_problem, problem_names

__all__ = [
    "TRACE_FIELDS",
    "ExperimentConfig",
    "ExperimentArchive",
    "EcdfCurve",
    "run_experiment",
    "write_trace",
    "load_trace",
    "load_traces",
    "load_config",
    "load_summaries",
    "evals_to_targets",
    "summaries_from_traces",
    "default_budget_grid",
    "compute_ecdf",
    "median_trajectory",
    "condition_number",
    "write_ecdf_csv",
    "write_median_csv",
]

# Serialized trace schema, one row per generation.
TRACE_FIELDS = (
    "t",
    "evals",
    "f_m",
    "best_f",
    "best_f_so_far",
    "sigma",
    "cond_C",
    "fitness_std",
    "restart_index",
    "dist_to_opt",
)

_INT_FIELDS = {"t", "evals", "restart_index"}

# Friendly aliases accepted by the aggregation entry points.
FIELD_ALIASES = {
    "distance-to-optimum": "dist_to_opt",
    "condition-number": "cond_C",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one batch of runs.

    ``targets`` are kept sorted descending; the smallest acts as the
    stopping target.  ``stop_fitness_std=None`` resolves to 0 (disabled)
    for plain runs, so deep targets stay reachable, and to 1e-9 under
    ``ipop`` where it is the restart trigger.
    """

    function: str
    dim: int
    budget: int
    runs: int = 1
    seed: int = 0
    targets: tuple[float, ...] = (1e-8,)
    sigma0: float = 1.0
    m0: tuple[float, ...] | None = None
    pair_count: int | None = None
    kappa: float = 3.0
    eta_a: float = 0.5
    ipop: bool = False
    stop_fitness_std: float | None = None
    instance_seed: int | None = None
    out_dir: str = "hees_out"
    fmt: str = "csv"

    def __post_init__(self) -> None:
        if self.function not in problem_names():
            raise ValueError(
                f"unknown objective {self.function!r}; "
                f"choose from {', '.join(problem_names())}"
            )
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if len(self.targets) == 0:
            raise ValueError("at least one target is required")
        targets = tuple(sorted((float(t) for t in self.targets), reverse=True))
        object.__setattr__(self, "targets", targets)
        if self.m0 is not None:
            m0 = tuple(float(v) for v in self.m0)
            if len(m0) != self.dim:
                raise ValueError(f"m0 must have {self.dim} components, got {len(m0)}")
            object.__setattr__(self, "m0", m0)
        if self.fmt != "csv":
            raise ValueError(f"unsupported trace format {self.fmt!r}")

    @property
    def final_target(self) -> float:
        return self.targets[-1]

    @property
    def resolved_stop_fitness_std(self) -> float:
        if self.stop_fitness_std is not None:
            return float(self.stop_fitness_std)
        return 1e-9 if self.ipop else 0.0


@dataclass(frozen=True)
class EcdfCurve:
    """Fraction of (run, target) pairs reached, per evaluation budget."""

    budgets: np.ndarray
    fractions: np.ndarray

    def __post_init__(self) -> None:
        if self.budgets.shape != self.fractions.shape:
            raise ValueError("budgets and fractions must have equal length")
        if np.any(np.diff(self.fractions) < 0.0):
            raise ValueError("fractions must be nondecreasing")
        if np.any((self.fractions < 0.0) | (self.fractions > 1.0)):
            raise ValueError("fractions must lie in [0, 1]")


@dataclass(frozen=True)
class ExperimentArchive:
    """Handles to everything ``run_experiment`` wrote."""

    out_dir: Path
    config: ExperimentConfig
    trace_paths: list[Path]
    summary_path: Path
    summaries: list[dict]
    results: list[RunResult] = field(repr=False, default_factory=list)


def _format_value(name: str, value) -> str:
    if name in _INT_FIELDS:
        return str(int(value))
    return repr(float(value))


def write_trace(path, records: list[GenerationRecord]) -> None:
    """One CSV row per generation, floats in shortest-roundtrip form."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_FIELDS)
        for rec in records:
            row = [_format_value(name, getattr(rec, name)) for name in TRACE_FIELDS]
            writer.writerow(row)


def load_trace(path) -> dict[str, np.ndarray]:
    """Read a trace CSV back into one array per column."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                columns[name].append(value)
    out: dict[str, np.ndarray] = {}
    for name, values in columns.items():
        dtype = int if name in _INT_FIELDS else float
        out[name] = np.array([dtype(v) for v in values], dtype=dtype)
    return out


def _target_key(target: float) -> str:
    return repr(float(target))


def evals_to_targets(evals, best_f_so_far, targets) -> dict[float, int | None]:
    """First evaluation count at which each target was reached, else None."""
    evals = np.asarray(evals)
    best = np.asarray(best_f_so_far)
    out: dict[float, int | None] = {}
    for target in targets:
        hits = np.nonzero(best <= float(target))[0]
        out[float(target)] = int(evals[hits[0]]) if hits.size else None
    return out


def run_experiment(config: ExperimentConfig) -> ExperimentArchive:
    """Execute ``config.runs`` independent seeded runs and persist traces.

    Run ``k`` uses seed ``config.seed + k``.  The output directory gets
    ``run_<k>.csv`` per run plus ``config.json`` and ``summary.json``;
    rerunning the same config overwrites the same bytes.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    objective = make_problem(config.function, config.dim, config.instance_seed)

    config_path = out_dir / "config.json"
    with config_path.open("w") as fh:
        json.dump(asdict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")

    trace_paths: list[Path] = []
    summaries: list[dict] = []
    results: list[RunResult] = []
    for k in range(config.runs):
        run_seed = config.seed + k
        engine = HeesOptimizer(
            dim=config.dim,
            m0=config.m0,
            sigma0=config.sigma0,
            pair_count=config.pair_count,
            kappa=config.kappa,
            eta_a=config.eta_a,
            seed=run_seed,
        )
        if config.ipop:
            result = engine.ipop_run(
                objective,
                config.budget,
                target_f=config.final_target,
                stop_fitness_std=config.resolved_stop_fitness_std,
            )
        else:
            result = engine.run(
                objective,
                config.budget,
                target_f=config.final_target,
                stop_fitness_std=config.resolved_stop_fitness_std,
            )
        trace_path = out_dir / f"run_{k}.csv"
        write_trace(trace_path, result.records)
        trace_paths.append(trace_path)
        results.append(result)

        hit = evals_to_targets(
            [rec.evals for rec in result.records],
            [rec.best_f_so_far for rec in result.records],
            config.targets,
        )
        summaries.append(
            {
                "run": k,
                "seed": run_seed,
                "evals_used": result.evals_used,
                "best_f": result.best_f,
                "termination_reason": result.termination_reason,
                "restart_count": result.restart_count,
                "evals_to_target": {
                    _target_key(t): hit[float(t)] for t in config.targets
                },
            }
        )

    summary_path = out_dir / "summary.json"
    with summary_path.open("w") as fh:
        json.dump(summaries, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return ExperimentArchive(
        out_dir=out_dir,
        config=config,
        trace_paths=trace_paths,
        summary_path=summary_path,
        summaries=summaries,
        results=results,
    )


def load_config(in_dir) -> ExperimentConfig:
    with (Path(in_dir) / "config.json").open() as fh:
        raw = json.load(fh)
    raw["targets"] = tuple(raw["targets"])
    if raw.get("m0") is not None:
        raw["m0"] = tuple(raw["m0"])
    return ExperimentConfig(**raw)


def load_summaries(in_dir) -> list[dict]:
    with (Path(in_dir) / "summary.json").open() as fh:
        return json.load(fh)


def load_traces(in_dir) -> list[dict[str, np.ndarray]]:
    """All ``run_<k>.csv`` traces of a directory, ordered by run index."""
    paths = sorted(
        Path(in_dir).glob("run_*.csv"), key=lambda p: int(p.stem.split("_")[1])
    )
    if not paths:
        raise FileNotFoundError(f"no run_*.csv traces found in {in_dir}")
    return [load_trace(p) for p in paths]


def summaries_from_traces(traces: list[dict[str, np.ndarray]], targets) -> list[dict]:
    """Minimal run summaries (evals-to-target only) recomputed from
    traces, so aggregation can use targets the runs were not stopped on."""
    summaries = []
    for k, trace in enumerate(traces):
        hit = evals_to_targets(trace["evals"], trace["best_f_so_far"], targets)
        summaries.append(
            {
                "run": k,
                "evals_to_target": {_target_key(t): v for t, v in hit.items()},
            }
        )
    return summaries


def default_budget_grid(budget: int) -> np.ndarray:
    """Log-spaced evaluation grid, 20 points per decade, from 1 to
    ``budget`` inclusive."""
    budget = int(budget)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    n = int(math.floor(20.0 * math.log10(budget))) if budget > 1 else 0
    grid = 10.0 ** (np.arange(n + 1) / 20.0)
    if grid[-1] < budget:
        grid = np.append(grid, float(budget))
    return grid


def compute_ecdf(summaries: list[dict], targets, budget_grid) -> EcdfCurve:
    """Empirical CDF of evaluation counts over (run, target) pairs.

    Each of the ``len(summaries) * len(targets)`` pairs counts as solved
    at budget ``b`` if the run reached the target within ``b``
    evaluations; unsolved pairs never count.
    """
    if not summaries:
        raise ValueError("summaries must be nonempty")
    targets = [float(t) for t in targets]
    if not targets:
        raise ValueError("targets must be nonempty")
    budget_grid = np.asarray(budget_grid, dtype=float)
    hit_evals: list[float] = []
    for summary in summaries:
        table = {float(k): v for k, v in summary["evals_to_target"].items()}
        for target in targets:
            if target not in table:
                raise ValueError(
                    f"run {summary.get('run')} has no evals-to-target entry "
                    f"for target {target!r}"
                )
            value = table[target]
            hit_evals.append(math.inf if value is None else float(value))
    hits = np.asarray(hit_evals)
    fractions = np.array(
        [float(np.count_nonzero(hits <= b)) / hits.size for b in budget_grid]
    )
    return EcdfCurve(budgets=budget_grid, fractions=fractions)


def median_trajectory(traces: list[dict[str, np.ndarray]], field: str):
    """Per-generation median of one trace column across runs.

    Runs are truncated to the shortest length.  Returns ``(t, values)``.
    Accepts the canonical column names plus the aliases
    ``distance-to-optimum`` and ``condition-number``.
    """
    if not traces:
        raise ValueError("traces must be nonempty")
    column = FIELD_ALIASES.get(field, field)
    if column not in TRACE_FIELDS or column == "t":
        raise ValueError(f"unknown trace field {field!r}")
    length = min(trace[column].shape[0] for trace in traces)
    if length == 0:
        raise ValueError("traces contain no generations")
    stacked = np.stack([trace[column][:length].astype(float) for trace in traces])
    t = traces[0]["t"][:length]
    return t, np.median(stacked, axis=0)


def write_ecdf_csv(path, curve: EcdfCurve) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["budget", "fraction"])
        for b, frac in zip(curve.budgets, curve.fractions):
            writer.writerow([repr(float(b)), repr(float(frac))])


def write_median_csv(path, t, values, field: str) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", field])
        for ti, vi in zip(t, values):
            writer.writerow([str(int(ti)), repr(float(vi))])
