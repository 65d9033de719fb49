"""One-dimensional Gaussian-process regression with a squared-exponential kernel."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import cho_solve

from . import kernels
from .errors import DuplicateError, NumericalError

JITTER_START = 1e-10
JITTER_MAX = 1e-4
LENGTH_SCALE_GRID = (0.05, 0.1, 0.2, 0.4)


@dataclass(frozen=True)
class KernelParams:
    variance: float = 1.0
    length_scale: float = 0.1
    noise: float = 0.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError(f"kernel variance must be > 0, got {self.variance}")
        if not self.length_scale > 0:
            raise ValueError(f"length scale must be > 0, got {self.length_scale}")
        if not self.noise >= 0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")


class Observation(NamedTuple):
    lam: float
    value: float


@dataclass(frozen=True)
class GPModel:
    params: KernelParams
    x: np.ndarray
    y: np.ndarray
    prior_mean: float
    chol: np.ndarray
    alpha_vec: np.ndarray
    jitter: float = 0.0

    @property
    def n_obs(self) -> int:
        return int(self.x.shape[0])


def kernel_eval(params: KernelParams, x: float, y: float) -> float:
    r = (x - y) / params.length_scale
    return params.variance * math.exp(-0.5 * r * r)


def gram(params: KernelParams, x: np.ndarray) -> np.ndarray:
    """Noise-free covariance matrix of the inputs ``x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    return kernels.se_cross(x, x, params.variance, params.length_scale)


def gp_fit(
    obs: Sequence[Observation],
    params: KernelParams,
    prior_mean: float = 0.0,
    jitter_start: float = JITTER_START,
) -> GPModel:
    """Factor ``K + noise*I`` and solve for the posterior-mean weights.

    If the plain factorization fails, jitter is added to the diagonal starting at
    ``jitter_start`` and growing tenfold up to ``JITTER_MAX``.
    """
    if len(obs) < 1:
        raise ValueError("gp_fit needs at least one observation")
    x = np.array([o[0] for o in obs], dtype=np.float64)
    y = np.array([o[1] for o in obs], dtype=np.float64)
    if params.noise == 0.0 and np.unique(x).size != x.size:
        raise DuplicateError("repeated inputs make the noise-free Gram matrix singular")

    base = gram(params, x)
    base[np.diag_indices_from(base)] += params.noise
    jitter = 0.0
    while True:
        try:
            chol = np.linalg.cholesky(base + jitter * np.eye(x.size) if jitter else base)
            break
        except np.linalg.LinAlgError:
            jitter = jitter_start if jitter == 0.0 else jitter * 10.0
            if jitter > JITTER_MAX * (1 + 1e-9):
                raise NumericalError(
                    f"Gram matrix of {x.size} points not positive definite up to jitter {JITTER_MAX}"
                ) from None
    alpha_vec = cho_solve((chol, True), y - prior_mean, check_finite=False)
    return GPModel(params, x, y, float(prior_mean), chol, alpha_vec, jitter)


def posterior(model: GPModel, xs, clamp: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance at each query point in ``xs``."""
    xs = np.ascontiguousarray(np.atleast_1d(xs), dtype=np.float64)
    p = model.params
    mean, var = kernels.gp_predict(
        model.chol, model.alpha_vec, model.x, xs, p.variance, p.length_scale, model.prior_mean
    )
    if clamp:
        var = np.maximum(var, 0.0)
    return mean, var


def gp_posterior(model: GPModel, x: float) -> tuple[float, float]:
    mean, var = posterior(model, [x])
    return float(mean[0]), float(var[0])


def log_marginal_likelihood(model: GPModel) -> float:
    r = model.y - model.prior_mean
    n = model.n_obs
    return float(
        -0.5 * r @ model.alpha_vec - np.log(np.diag(model.chol)).sum() - 0.5 * n * math.log(2 * math.pi)
    )


@dataclass(frozen=True)
class KernelPolicy:
    """How kernel hyperparameters are chosen from the data at each BO step.

    ``variance=None`` means the sample variance of the observed values (1.0 when
    that is zero); ``prior_mean=None`` means the mean of the observed values. The
    length scale is ``length_scale_factor * (1 - alpha)``; with ``refine`` set,
    the factor is instead picked from ``LENGTH_SCALE_GRID`` by marginal likelihood.
    """

    noise: float = 1e-6
    length_scale_factor: float = 0.2
    variance: float | None = None
    prior_mean: float | None = None
    refine: bool = False

    def params_for(self, values: Sequence[float], alpha: float, factor: float | None = None) -> KernelParams:
        values = np.asarray(values, dtype=np.float64)
        variance = self.variance
        if variance is None:
            variance = float(values.var(ddof=1)) if values.size > 1 else 0.0
            if not variance > 0:
                variance = 1.0
        factor = self.length_scale_factor if factor is None else factor
        return KernelParams(variance=variance, length_scale=factor * (1.0 - alpha), noise=self.noise)

    def mean_for(self, values: Sequence[float]) -> float:
        if self.prior_mean is not None:
            return float(self.prior_mean)
        return float(np.mean(values))

    def fit(self, obs: Sequence[Observation], alpha: float, jitter_start: float = JITTER_START) -> GPModel:
        values = [o[1] for o in obs]
        mu0 = self.mean_for(values)
        if not self.refine:
            return gp_fit(obs, self.params_for(values, alpha), mu0, jitter_start)
        best, best_lml = None, -math.inf
        for factor in LENGTH_SCALE_GRID:
            model = gp_fit(obs, self.params_for(values, alpha, factor), mu0, jitter_start)
            lml = log_marginal_likelihood(model)
            if lml > best_lml:
                best, best_lml = model, lml
        return best
