"""Reference search strategies for the merge weight: grid, random, greedy.

Each returns an ``OptResult`` with one trace entry per objective call, so
results are directly comparable with ``bayesopt.optimize`` at equal budget.

Greedy search is a pattern search started at ``lambda = 1``: from the incumbent
it tries ``x - step`` then ``x + step`` (clamped to the bounds), moves on strict
improvement, and multiplies ``step`` by ``greedy_shrink`` when neither helps.
Points already evaluated are answered from cache and cost no budget. The
search ends early only if the step shrinks below float resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bayesopt import OptResult, SearchBounds, _Recorder


@dataclass(frozen=True)
class BaselineConfig:
    budget: int = 15
    seed: int = 0
    greedy_step: float = 0.1
    greedy_shrink: float = 0.5

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if not self.greedy_step > 0:
            raise ValueError("greedy_step must be > 0")
        if not (0.0 < self.greedy_shrink < 1.0):
            raise ValueError("greedy_shrink must lie in (0, 1)")


def grid_search(objective, bounds: SearchBounds, cfg: BaselineConfig = BaselineConfig()) -> OptResult:
    if cfg.budget < 2:
        raise ValueError("grid search needs budget >= 2")
    rec = _Recorder(objective, "grid")
    for lam in np.linspace(bounds.alpha, bounds.upper, cfg.budget):
        rec(lam)
    return OptResult.from_trace("grid", rec.trace)


def random_search(objective, bounds: SearchBounds, cfg: BaselineConfig = BaselineConfig()) -> OptResult:
    """Uniform draws from a Philox (counter-based) generator seeded with ``cfg.seed``."""
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    rec = _Recorder(objective, "random")
    for u in rng.random(cfg.budget):
        rec(bounds.alpha + (bounds.upper - bounds.alpha) * u)
    return OptResult.from_trace("random", rec.trace)


def greedy_search(objective, bounds: SearchBounds, cfg: BaselineConfig = BaselineConfig()) -> OptResult:
    if cfg.budget < 3:
        raise ValueError("greedy search needs budget >= 3")
    rec = _Recorder(objective, "greedy")
    cache: dict[float, float] = {}

    def f(lam):
        if lam not in cache:
            cache[lam] = rec(lam)
        return cache[lam]

    x = bounds.upper
    fx = f(x)
    step = cfg.greedy_step
    while len(rec.trace) < cfg.budget:
        moved = False
        for cand in (x - step, x + step):
            cand = float(min(max(cand, bounds.alpha), bounds.upper))
            if cand == x:
                continue
            fresh = cand not in cache
            if fresh and len(rec.trace) >= cfg.budget:
                break
            fc = f(cand)
            if fc > fx:
                x, fx, moved = cand, fc, True
                break
        if not moved:
            step *= cfg.greedy_shrink
            if step < 1e-12 * (bounds.upper - bounds.alpha):
                # converged to float resolution; nothing new left to try
                break
    return OptResult.from_trace("greedy", rec.trace)
