"""Pure-numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_numba``.
Inputs are flat, contiguous arrays; callers handle reshaping.
"""

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import ndtr

_INV_SQRT_2PI = 0.3989422804014327


def lerp_f32(prev, curr, lam):
    """``lam * curr + (1 - lam) * prev`` in float64, rounded once to float32."""
    if lam == 1.0:
        return curr.copy()
    if lam == 0.0:
        return prev.copy()
    out = lam * curr.astype(np.float64) + (1.0 - lam) * prev.astype(np.float64)
    return out.astype(np.float32)


def axpy_f64(acc, w, x):
    """In-place ``acc += w * x`` with float32 ``x`` promoted to float64."""
    acc += w * x.astype(np.float64)


def sq_dist(a, b):
    d = a.astype(np.float64) - b.astype(np.float64)
    return float(np.dot(d, d))


def se_cross(x, y, variance, length_scale):
    d = x[:, None] - y[None, :]
    return variance * np.exp(-0.5 * (d / length_scale) ** 2)


def gp_predict(chol, alpha, x_obs, grid, variance, length_scale, prior_mean):
    """Posterior mean and (unclamped) variance at every grid point."""
    ks = se_cross(x_obs, grid, variance, length_scale)
    mean = prior_mean + ks.T @ alpha
    v = solve_triangular(chol, ks, lower=True, check_finite=False)
    var = variance - np.einsum("ij,ij->j", v, v)
    return mean, var


def acq_grid(mean, var, best, xi, beta):
    """EI, PI and UCB evaluated element-wise; ``var`` must already be >= 0."""
    sigma = np.sqrt(var)
    d = mean - best - xi
    pos = sigma > 0.0
    safe = np.where(pos, sigma, 1.0)
    z = d / safe
    ei = np.where(pos, d * ndtr(z) + sigma * _INV_SQRT_2PI * np.exp(-0.5 * z * z), np.maximum(d, 0.0))
    ei = np.maximum(ei, 0.0)
    pi = np.where(pos, ndtr(z), (d > 0.0).astype(np.float64))
    ucb = mean + beta * sigma
    return ei, pi, ucb
