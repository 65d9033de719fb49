"""EI / PI / UCB acquisition values and the GP-Hedge portfolio over them.

The three acquisitions live on different scales (EI in objective units, PI a
probability, UCB in objective units offset by the mean), so before they are
mixed each one is min-max normalized over the candidate grid of the current
step. The hedge weights are a softmax of ``eta`` times the cumulative rewards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import kernels
from .gp import GPModel, posterior

ACQ_NAMES = ("ei", "pi", "ucb")
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AcqConfig:
    beta: float = 2.0
    xi: float = 0.0

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.xi >= 0:
            raise ValueError(f"xi must be >= 0, got {self.xi}")


@dataclass(frozen=True)
class HedgeState:
    rewards: tuple[float, float, float] = (0.0, 0.0, 0.0)
    eta: float = 1.0
    step: int = 0

    def __post_init__(self):
        if len(self.rewards) != len(ACQ_NAMES):
            raise ValueError("HedgeState needs one reward per acquisition")
        if not all(math.isfinite(r) for r in self.rewards):
            raise ValueError(f"rewards must be finite: {self.rewards}")
        if not self.eta > 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def expected_improvement(mean: float, variance: float, best: float, cfg: AcqConfig = AcqConfig()) -> float:
    d = mean - best - cfg.xi
    sigma = math.sqrt(max(variance, 0.0))
    if sigma == 0.0:
        return max(d, 0.0)
    z = d / sigma
    return max(d * _norm_cdf(z) + sigma * _INV_SQRT_2PI * math.exp(-0.5 * z * z), 0.0)


def probability_of_improvement(mean: float, variance: float, best: float, cfg: AcqConfig = AcqConfig()) -> float:
    d = mean - best - cfg.xi
    sigma = math.sqrt(max(variance, 0.0))
    if sigma == 0.0:
        return 1.0 if d > 0.0 else 0.0
    return _norm_cdf(d / sigma)


def ucb(mean: float, variance: float, cfg: AcqConfig = AcqConfig()) -> float:
    return mean + cfg.beta * math.sqrt(max(variance, 0.0))


def hedge_weights(state: HedgeState) -> np.ndarray:
    """Softmax of ``eta * rewards`` with the max subtracted first."""
    z = state.eta * np.asarray(state.rewards, dtype=np.float64)
    z -= z.max()
    w = np.exp(z)
    return w / w.sum()


def minmax(values: np.ndarray) -> np.ndarray:
    """Rescale to [0, 1]; a constant array maps to all zeros."""
    lo, hi = float(values.min()), float(values.max())
    if not hi > lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


@dataclass
class HedgeSurface:
    """Everything computed for one proposal step on a candidate grid."""

    grid: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    raw: dict[str, np.ndarray]
    normalized: dict[str, np.ndarray]
    weights: np.ndarray
    combined: np.ndarray


def acquisition_surfaces(model: GPModel, grid, cfg: AcqConfig, best: float) -> tuple[np.ndarray, np.ndarray, dict]:
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    mean, var = posterior(model, grid)
    ei, pi, u = kernels.acq_grid(mean, var, float(best), cfg.xi, cfg.beta)
    return mean, var, {"ei": ei, "pi": pi, "ucb": u}


def hedge_surface(model: GPModel, state: HedgeState, cfg: AcqConfig, best: float, grid) -> HedgeSurface:
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    mean, var, raw = acquisition_surfaces(model, grid, cfg, best)
    normalized = {k: minmax(v) for k, v in raw.items()}
    w = hedge_weights(state)
    combined = sum(wi * normalized[k] for wi, k in zip(w, ACQ_NAMES))
    return HedgeSurface(grid, mean, var, raw, normalized, w, combined)


def hedge_acquisition(model: GPModel, state: HedgeState, cfg: AcqConfig, best: float, x, grid):
    """GP-Hedge value at ``x``; normalization ranges come from ``grid``.

    ``x`` may be a scalar or an array. Points outside the grid are normalized
    with the grid's ranges, so they can fall outside [0, 1].
    """
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    _, _, raw_grid = acquisition_surfaces(model, grid, cfg, best)
    _, _, raw_x = acquisition_surfaces(model, np.atleast_1d(x), cfg, best)
    w = hedge_weights(state)
    out = np.zeros(np.atleast_1d(x).shape)
    for wi, k in zip(w, ACQ_NAMES):
        lo, hi = raw_grid[k].min(), raw_grid[k].max()
        if hi > lo:
            out += wi * (raw_x[k] - lo) / (hi - lo)
    return float(out[0]) if np.ndim(x) == 0 else out


def hedge_update(state: HedgeState, model: GPModel, nominees: Sequence[float]) -> HedgeState:
    """Add the refitted posterior mean at each acquisition's own nominee to its reward."""
    if len(nominees) != len(ACQ_NAMES):
        raise ValueError("need exactly one nominee per acquisition")
    means, _ = posterior(model, np.asarray(nominees, dtype=np.float64))
    rewards = tuple(float(r + m) for r, m in zip(state.rewards, means))
    return replace(state, rewards=rewards, step=state.step + 1)
