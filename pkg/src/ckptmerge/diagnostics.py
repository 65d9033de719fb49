"""Closed-form diagnostics for merged checkpoints.

The bound evaluators take the smoothness and curvature constants as inputs;
nothing here estimates them except ``directional_curvature``, a finite
difference probe meant for small models.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .checkpoint import Checkpoint, validate_compat
from .errors import CompatError, DivergenceError, DomainError
from .merge import pairwise_merge

DIVERGENCE_LIMIT = 1e12


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


@dataclass(frozen=True)
class BoundInputs:
    f_curr: float
    f_prev: float
    lam: float
    lipschitz_grad: float
    hess_max: float
    hess_min: float = 0.0
    dist_sq: float = 0.0

    def __post_init__(self):
        _check(0.0 <= self.lam <= 1.0, f"lambda must lie in [0, 1], got {self.lam}")
        _check(self.lipschitz_grad >= 0, "lipschitz_grad must be >= 0")
        _check(self.hess_min >= 0 and self.hess_max >= 0, "Hessian bounds must be >= 0")
        _check(self.hess_min <= self.hess_max, "hess_min must not exceed hess_max")
        _check(self.dist_sq >= 0, "dist_sq must be >= 0")


@dataclass(frozen=True)
class PacBayesInputs:
    lam: float
    dist_sq: float
    sigma_sq: float
    n: int = 1
    delta: float = 0.05
    empirical_loss: float = 0.0

    def __post_init__(self):
        _check(self.dist_sq >= 0, "dist_sq must be >= 0")
        _check(self.sigma_sq > 0, "sigma_sq must be > 0")
        _check(self.n >= 1, "n must be >= 1")
        _check(0.0 < self.delta < 1.0, "delta must lie in (0, 1)")


@dataclass(frozen=True)
class ConvergenceInputs:
    eta: float
    mu: float
    lam: float
    hess_max: float

    def __post_init__(self):
        _check(self.eta > 0, "eta must be > 0")
        _check(self.mu > 0, "mu must be > 0")
        _check(0.0 <= self.lam <= 1.0, f"lambda must lie in [0, 1], got {self.lam}")
        _check(self.hess_max >= 0, "hess_max must be >= 0")


def merge_distance(a: Checkpoint, b: Checkpoint) -> float:
    """Squared Euclidean distance between two checkpoints, summed in float64."""
    report = validate_compat(a, b)
    if not report.compatible:
        raise CompatError(report)
    return math.fsum(kernels.sq_dist(x.reshape(-1), b[name].reshape(-1)) for name, x in a.items())


def performance_bound(inp: BoundInputs) -> tuple[float, float]:
    """Interval around the interpolated score that contains the merged score.

    center = lam * f_curr + (1 - lam) * f_prev
    width  = (lam (1 - lam) L_g + (lam^2 + (1 - lam)^2) hess_max / 2) * dist_sq
    """
    lam = inp.lam
    center = lam * inp.f_curr + (1.0 - lam) * inp.f_prev
    coeff = lam * (1.0 - lam) * inp.lipschitz_grad + 0.5 * (lam * lam + (1.0 - lam) ** 2) * inp.hess_max
    width = coeff * inp.dist_sq
    return center - width, center + width


def kl_divergence(inp: PacBayesInputs) -> float:
    """KL between isotropic Gaussians centred on the merged and previous checkpoints."""
    return inp.lam * inp.lam * inp.dist_sq / (2.0 * inp.sigma_sq)


def pac_bayes_bound(inp: PacBayesInputs) -> float:
    complexity = (kl_divergence(inp) + math.log(2.0 * math.sqrt(inp.n) / inp.delta)) / (2.0 * inp.n)
    return inp.empirical_loss + math.sqrt(complexity)


def convergence_rate(inp: ConvergenceInputs) -> float:
    """Per-merge contraction factor of the loss suboptimality."""
    gap = 1.0 - inp.lam
    return 1.0 - 2.0 * inp.eta * inp.mu * gap * (1.0 - 0.5 * inp.eta * gap * inp.hess_max)


def _values(trace) -> list[float]:
    if hasattr(trace, "trace"):
        trace = trace.trace
    return [float(o[1]) if isinstance(o, tuple) else float(o) for o in trace]


def cumulative_regret(trace, f_star: float) -> list[float]:
    """Prefix sums of ``f_star - f(lambda_t)`` over the evaluated points.

    ``trace`` may be an OptResult, a list of observations, or a list of values.
    """
    values = _values(trace)
    worst = max(values, default=-math.inf)
    if worst > f_star:
        raise DomainError(f"f_star={f_star!r} is below an observed value {worst!r}")
    return list(itertools.accumulate(f_star - v for v in values))


def simple_regret(trace, f_star: float) -> list[float]:
    """Gap between ``f_star`` and the best value seen after each evaluation."""
    values = _values(trace)
    if max(values, default=-math.inf) > f_star:
        raise DomainError("f_star is below an observed value")
    return [f_star - b for b in itertools.accumulate(values, max)]


@dataclass
class DescentTrace:
    """Per-step record of gradient descent interleaved with merging.

    ``loss_step[t]`` is the loss right after the gradient step, ``loss_merged[t]``
    after merging, ``contraction[t]`` their ratio (NaN where the step loss is 0),
    and ``rho[t]`` the predicted contraction factor for that step.
    """

    initial_loss: float
    loss_step: list[float] = field(default_factory=list)
    loss_merged: list[float] = field(default_factory=list)
    contraction: list[float] = field(default_factory=list)
    rho: list[float] = field(default_factory=list)
    lambdas: list[float] = field(default_factory=list)
    theta: np.ndarray | None = None


def simulate_merged_descent(
    dim: int,
    eta: float,
    mu: float,
    hess_max: float,
    lambda_schedule: Sequence[float],
    steps: int,
    seed: int = 0,
    theta0: Sequence[float] | None = None,
    partner: str = "lookahead",
) -> DescentTrace:
    """Gradient descent on ``L(x) = x^T H x / 2`` with a pairwise merge after every step.

    ``H`` has eigenvalues evenly spaced on ``[mu, hess_max]`` in a seeded random
    basis, so ``L* = 0``. At step ``t`` the iterate ``x_t`` (one gradient step from
    the previous merged point) is merged as ``lam_t * x_t + (1 - lam_t) * p_t``.

    ``partner`` picks ``p_t``:

    * ``"lookahead"``: ``p_t = x_t - eta * grad L(x_t)``. This is the neighbour
      for which ``p_t - x_t = -eta * grad L(x_t)`` holds exactly, the relation the
      contraction factor from ``convergence_rate`` is built on.
    * ``"history"``: ``p_t`` is the point the gradient step started from. Any
      convex combination of two consecutive exact-gradient iterates on a convex
      quadratic then loses ground against ``x_t``, so contractions exceed 1.

    ``lambda_schedule`` must hold ``steps`` weights, or a single weight reused
    for every step.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if partner not in ("lookahead", "history"):
        raise ValueError(f"unknown partner {partner!r}")
    lams = [float(l) for l in lambda_schedule]
    if len(lams) == 1:
        lams = lams * steps
    if len(lams) != steps:
        raise ValueError("lambda_schedule must have length 1 or `steps`")
    if not 0 < mu <= hess_max:
        raise ValueError("need 0 < mu <= hess_max")

    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    spectrum = np.linspace(mu, hess_max, dim)
    h = (q * spectrum) @ q.T
    x = rng.standard_normal(dim) if theta0 is None else np.asarray(theta0, dtype=np.float64).copy()

    def loss(v):
        return 0.5 * float(v @ h @ v)

    out = DescentTrace(initial_loss=loss(x))
    for lam in lams:
        start = x
        x_step = start - eta * (h @ start)
        p = x_step - eta * (h @ x_step) if partner == "lookahead" else start
        x = lam * x_step + (1.0 - lam) * p if lam != 1.0 else x_step
        ls, lm = loss(x_step), loss(x)
        if not (math.isfinite(lm) and math.isfinite(ls)) or max(ls, lm) > DIVERGENCE_LIMIT:
            raise DivergenceError(f"loss exceeded {DIVERGENCE_LIMIT:g} at step {len(out.loss_step) + 1}")
        out.loss_step.append(ls)
        out.loss_merged.append(lm)
        out.contraction.append(lm / ls if ls > 0 else math.nan)
        out.rho.append(convergence_rate(ConvergenceInputs(eta, mu, lam, hess_max)))
        out.lambdas.append(lam)
    out.theta = x
    return out


def directional_curvature(
    loss_fn: Callable[[Checkpoint], float],
    a: Checkpoint,
    b: Checkpoint,
    at: float = 0.5,
    h: float = 0.05,
) -> float:
    """Estimate ``d^T H d / |d|^2`` for ``d = b - a`` at ``a + at * d``.

    Central second difference of ``t -> loss_fn(pairwise_merge(a, b, t))``;
    all three probe points must stay inside [0, 1].
    """
    if not (0.0 <= at - h and at + h <= 1.0):
        raise ValueError("probe points must lie in [0, 1]")
    dist_sq = merge_distance(a, b)
    if dist_sq == 0.0:
        return 0.0
    g = [loss_fn(pairwise_merge(a, b, t)) for t in (at - h, at, at + h)]
    return (g[0] - 2.0 * g[1] + g[2]) / (h * h) / dist_sq
