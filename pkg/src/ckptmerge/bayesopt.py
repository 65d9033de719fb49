"""Bayesian optimization of the pairwise merge weight.

The loop evaluates both ends of the search interval first, then repeatedly fits
a GP to all observations, maximizes the GP-Hedge acquisition on a dense grid,
evaluates the objective there, and updates the hedge rewards. It returns the
best observed weight. Everything is deterministic: ties go to the smallest
weight and the earliest observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .acquisition import ACQ_NAMES, AcqConfig, HedgeState, hedge_surface, hedge_update
from .checkpoint import Checkpoint, validate_compat
from .errors import CompatError, NumericalError, ObjectiveError
from .gp import KernelPolicy, Observation
from .merge import pairwise_merge

COLLISION_TOL = 1e-12
MAX_BUDGET = 1000


@dataclass(frozen=True)
class SearchBounds:
    alpha: float = 0.5
    upper: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.upper != 1.0:
            raise ValueError("the upper search bound is fixed at 1")

    def grid(self, resolution: int) -> np.ndarray:
        if resolution < 2:
            raise ValueError("grid resolution must be >= 2")
        return np.linspace(self.alpha, self.upper, int(resolution))

    def contains(self, lam: float) -> bool:
        return self.alpha <= lam <= self.upper


@dataclass(frozen=True)
class OptConfig:
    budget: int = 15
    grid_resolution: int = 1001
    seed: int = 0
    kernel: KernelPolicy = field(default_factory=KernelPolicy)
    acq: AcqConfig = field(default_factory=AcqConfig)
    hedge_eta: float = 1.0
    patience: int | None = None
    repeats: int = 1

    def __post_init__(self):
        if not (2 <= self.budget <= MAX_BUDGET):
            raise ValueError(f"budget must be in [2, {MAX_BUDGET}], got {self.budget}")
        if self.grid_resolution < 101:
            raise ValueError("grid_resolution must be >= 101")
        if not self.hedge_eta > 0:
            raise ValueError("hedge_eta must be > 0")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be >= 1 when set")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


@dataclass
class OptResult:
    strategy: str
    trace: list[Observation]
    best_lambda: float
    best_value: float
    per_step_best: list[float]
    hedge_log: list[dict] = field(default_factory=list)
    stopped_early: bool = False

    @classmethod
    def from_trace(cls, strategy: str, trace: Sequence[Observation], hedge_log=None, stopped_early=False):
        trace = [Observation(float(l), float(v)) for l, v in trace]
        per_step, best_i = [], None
        for i, (_, v) in enumerate(trace):
            if best_i is None or v > trace[best_i].value:
                best_i = i
            per_step.append(trace[best_i].value)
        if best_i is None:
            return cls(strategy, [], math.nan, math.nan, [], list(hedge_log or []), stopped_early)
        return cls(
            strategy,
            trace,
            trace[best_i].lam,
            trace[best_i].value,
            per_step,
            list(hedge_log or []),
            stopped_early,
        )

    @property
    def n_evals(self) -> int:
        return len(self.trace)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "trace": [{"lambda": o.lam, "value": o.value} for o in self.trace],
            "best_lambda": self.best_lambda,
            "best_value": self.best_value,
            "per_step_best": list(self.per_step_best),
            "hedge_log": self.hedge_log,
            "stopped_early": self.stopped_early,
        }


class _Recorder:
    """Calls the objective and records every observation, wrapping failures."""

    def __init__(self, objective, strategy: str, repeats: int = 1):
        self.objective = objective
        self.strategy = strategy
        self.repeats = repeats
        self.trace: list[Observation] = []
        self.hedge_log: list[dict] = []

    def partial(self) -> OptResult:
        return OptResult.from_trace(self.strategy, self.trace, self.hedge_log)

    def __call__(self, lam: float) -> float:
        lam = float(lam)
        try:
            vals = [float(self.objective(lam)) for _ in range(self.repeats)]
        except Exception as exc:
            raise ObjectiveError(f"objective failed at lambda={lam!r}: {exc}", self.partial()) from exc
        value = math.fsum(vals) / len(vals)
        if not math.isfinite(value):
            raise ObjectiveError(f"objective returned {value!r} at lambda={lam!r}", self.partial())
        self.trace.append(Observation(lam, value))
        return value

    def evaluated(self) -> list[float]:
        return [o.lam for o in self.trace]


def _collides(lam: float, evaluated: Sequence[float]) -> bool:
    return any(abs(lam - e) <= COLLISION_TOL for e in evaluated)


def argmax_on_grid(grid: np.ndarray, values: np.ndarray, evaluated: Sequence[float] = ()) -> float:
    """Grid point with the largest value (smallest on ties), avoiding evaluated points.

    A collision with an already-evaluated weight moves the proposal to the better
    free neighbour; if both neighbours are taken, the best free grid point is used.
    """
    i = int(np.argmax(values))
    if not evaluated or not _collides(grid[i], evaluated):
        return float(grid[i])
    neighbours = [j for j in (i - 1, i + 1) if 0 <= j < grid.size and not _collides(grid[j], evaluated)]
    if neighbours:
        j = max(neighbours, key=lambda j: (values[j], -j))
        return float(grid[j])
    free = np.array([not _collides(g, evaluated) for g in grid])
    if not free.any():
        return float(grid[i])
    masked = np.where(free, values, -np.inf)
    return float(grid[int(np.argmax(masked))])


def argmax_acquisition(
    acq: Callable[[float], float],
    bounds: SearchBounds,
    resolution: int,
    evaluated: Sequence[float] = (),
) -> float:
    grid = bounds.grid(resolution)
    values = np.array([float(acq(float(x))) for x in grid])
    return argmax_on_grid(grid, values, evaluated)


def _fit(policy: KernelPolicy, trace, alpha):
    try:
        return policy.fit(trace, alpha)
    except NumericalError:
        bumped = replace(policy, noise=max(policy.noise * 100.0, 1e-4))
        return bumped.fit(trace, alpha)


def optimize(objective: Callable[[float], float], bounds: SearchBounds, cfg: OptConfig = OptConfig()) -> OptResult:
    """Maximize ``objective`` over ``[bounds.alpha, 1]`` with GP-Hedge BO.

    Raises
    ------
    ObjectiveError
        The objective raised or returned a non-finite value; ``exc.partial``
        carries the observations collected so far.
    NumericalError
        The GP could not be fitted even after one retry with extra noise.
    """
    rec = _Recorder(objective, "bo", cfg.repeats)
    rec(bounds.alpha)
    rec(bounds.upper)
    grid = bounds.grid(cfg.grid_resolution)
    state = HedgeState(eta=cfg.hedge_eta)
    stopped_early = False
    since_best = 0

    model = None
    while len(rec.trace) < cfg.budget:
        if model is None:
            model = _fit(cfg.kernel, rec.trace, bounds.alpha)
        best = max(o.value for o in rec.trace)
        surf = hedge_surface(model, state, cfg.acq, best, grid)
        evaluated = rec.evaluated()
        lam = argmax_on_grid(grid, surf.combined, evaluated)
        nominees = [float(grid[int(np.argmax(surf.normalized[k]))]) for k in ACQ_NAMES]

        value = rec(lam)
        model = _fit(cfg.kernel, rec.trace, bounds.alpha)
        new_state = hedge_update(state, model, nominees)
        rec.hedge_log.append(
            {
                "step": len(rec.trace),
                "lambda": lam,
                "value": value,
                "weights": [float(w) for w in surf.weights],
                "nominees": nominees,
                "rewards": list(new_state.rewards),
                "length_scale": model.params.length_scale,
                "jitter": model.jitter,
            }
        )
        state = new_state

        since_best = 0 if value > best else since_best + 1
        if cfg.patience is not None and since_best >= cfg.patience:
            stopped_early = True
            break

    return OptResult.from_trace("bo", rec.trace, rec.hedge_log, stopped_early)


def optimize_merge(
    prev: Checkpoint,
    curr: Checkpoint,
    evaluator: Callable[[Checkpoint], float],
    bounds: SearchBounds,
    cfg: OptConfig = OptConfig(),
) -> tuple[Checkpoint, OptResult]:
    """Search the merge weight of ``(prev, curr)`` that maximizes ``evaluator``."""
    report = validate_compat(prev, curr)
    if not report.compatible:
        raise CompatError(report)
    result = optimize(lambda lam: evaluator(pairwise_merge(prev, curr, lam)), bounds, cfg)
    return pairwise_merge(prev, curr, result.best_lambda), result
