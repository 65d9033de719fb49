"""Numba-compiled twins of the kernels in ``_numpy``."""

import math

import numpy as np
from numba import njit

_INV_SQRT_2PI = 0.3989422804014327
_INV_SQRT2 = 0.7071067811865476


@njit(cache=True, nogil=True)
def lerp_f32(prev, curr, lam):
    n = prev.shape[0]
    out = np.empty(n, dtype=np.float32)
    if lam == 1.0:
        out[:] = curr
        return out
    if lam == 0.0:
        out[:] = prev
        return out
    one_minus = 1.0 - lam
    for i in range(n):
        out[i] = np.float32(lam * np.float64(curr[i]) + one_minus * np.float64(prev[i]))
    return out


@njit(cache=True, nogil=True)
def axpy_f64(acc, w, x):
    for i in range(acc.shape[0]):
        acc[i] += w * np.float64(x[i])


@njit(cache=True, nogil=True)
def sq_dist(a, b):
    total = 0.0
    for i in range(a.shape[0]):
        d = np.float64(a[i]) - np.float64(b[i])
        total += d * d
    return total


@njit(cache=True, nogil=True)
def se_cross(x, y, variance, length_scale):
    out = np.empty((x.shape[0], y.shape[0]))
    inv = 1.0 / length_scale
    for i in range(x.shape[0]):
        for j in range(y.shape[0]):
            r = (x[i] - y[j]) * inv
            out[i, j] = variance * math.exp(-0.5 * r * r)
    return out


@njit(cache=True, nogil=True)
def gp_predict(chol, alpha, x_obs, grid, variance, length_scale, prior_mean):
    n = x_obs.shape[0]
    m = grid.shape[0]
    mean = np.empty(m)
    var = np.empty(m)
    k = np.empty(n)
    v = np.empty(n)
    inv = 1.0 / length_scale
    for j in range(m):
        for i in range(n):
            r = (x_obs[i] - grid[j]) * inv
            k[i] = variance * math.exp(-0.5 * r * r)
        mu = prior_mean
        for i in range(n):
            mu += k[i] * alpha[i]
        # forward substitution: chol @ v = k
        acc = 0.0
        for i in range(n):
            s = k[i]
            for p in range(i):
                s -= chol[i, p] * v[p]
            v[i] = s / chol[i, i]
            acc += v[i] * v[i]
        mean[j] = mu
        var[j] = variance - acc
    return mean, var


@njit(cache=True, nogil=True)
def acq_grid(mean, var, best, xi, beta):
    m = mean.shape[0]
    ei = np.empty(m)
    pi = np.empty(m)
    ucb = np.empty(m)
    for j in range(m):
        sigma = math.sqrt(var[j])
        d = mean[j] - best - xi
        if sigma > 0.0:
            z = d / sigma
            cdf = 0.5 * math.erfc(-z * _INV_SQRT2)
            e = d * cdf + sigma * _INV_SQRT_2PI * math.exp(-0.5 * z * z)
            ei[j] = e if e > 0.0 else 0.0
            pi[j] = cdf
        else:
            ei[j] = d if d > 0.0 else 0.0
            pi[j] = 1.0 if d > 0.0 else 0.0
        ucb[j] = mean[j] + beta * sigma
    return ei, pi, ucb
