"""Convex combinations of checkpoints.

All arithmetic is done in float64 and rounded to float32 exactly once per
element. Tensors are processed one at a time, so the working set beyond the
inputs and output is a single float64 buffer the size of the largest tensor.
Only parameters are merged; there is no notion of optimizer state here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .checkpoint import Checkpoint, validate_compat
from .errors import CompatError, EmptyInputError, WeightError

WEIGHT_SUM_TOL = 1e-9


def _require_compat(a: Checkpoint, b: Checkpoint) -> None:
    report = validate_compat(a, b)
    if not report.compatible:
        raise CompatError(report)


def pairwise_merge(prev: Checkpoint, curr: Checkpoint, lam: float) -> Checkpoint:
    """Return ``lam * curr + (1 - lam) * prev``.

    ``lam = 1`` reproduces ``curr`` and ``lam = 0`` reproduces ``prev`` bit for bit.
    """
    lam = float(lam)
    if not (0.0 <= lam <= 1.0):
        raise WeightError(f"merge weight must lie in [0, 1], got {lam}")
    _require_compat(prev, curr)
    out = {}
    for name, p in prev.items():
        c = curr[name]
        out[name] = kernels.lerp_f32(p.reshape(-1), c.reshape(-1), lam).reshape(p.shape)
    return Checkpoint(out)


def check_weights(weights: Sequence[float], n: int) -> list[float]:
    w = [float(x) for x in weights]
    if len(w) != n:
        raise WeightError(f"got {len(w)} weights for {n} checkpoints")
    if any(not math.isfinite(x) or x < 0.0 for x in w):
        raise WeightError(f"weights must be finite and non-negative: {w}")
    if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
        raise WeightError(f"weights must sum to 1 (sum = {math.fsum(w)!r})")
    return w


def soup(ckpts: Sequence[Checkpoint], weights: Sequence[float]) -> Checkpoint:
    """Weighted parameter average of ``ckpts`` (the weights must sum to one)."""
    if not ckpts:
        raise EmptyInputError("soup needs at least one checkpoint")
    w = check_weights(weights, len(ckpts))
    first = ckpts[0]
    for other in ckpts[1:]:
        _require_compat(first, other)
    out = {}
    for name, arr in first.items():
        acc = np.zeros(arr.size, dtype=np.float64)
        for ck, wi in zip(ckpts, w):
            kernels.axpy_f64(acc, wi, ck[name].reshape(-1))
        out[name] = acc.astype(np.float32).reshape(arr.shape)
    return Checkpoint(out)


def uniform_soup(ckpts: Sequence[Checkpoint]) -> Checkpoint:
    if not ckpts:
        raise EmptyInputError("uniform soup of an empty list")
    n = len(ckpts)
    return soup(ckpts, [1.0 / n] * n)


@dataclass
class SoupTrace:
    """Decision log of a greedy soup.

    ``considered`` holds ``(checkpoint_id, dev_score, accepted)`` in visit order;
    ``dev_score`` is the score of the candidate soup that included the checkpoint.
    """

    considered: list[tuple[object, float, bool]] = field(default_factory=list)
    final_members: list[object] = field(default_factory=list)
    final_score: float = float("nan")

    def running_scores(self) -> list[float]:
        scores, best = [], -math.inf
        for _, s, accepted in self.considered:
            if accepted:
                best = s
            scores.append(best)
        return scores


def greedy_soup(
    ckpts: Sequence[Checkpoint],
    evaluator: Callable[[Checkpoint], float],
    ids: Sequence[object] | None = None,
) -> tuple[Checkpoint, SoupTrace]:
    """Greedy soup over ``ckpts`` in the given order.

    A checkpoint joins when the uniform average of the current members plus the
    candidate scores strictly higher than the current soup; ties are rejected.
    """
    if not ckpts:
        raise EmptyInputError("greedy soup of an empty list")
    ids = list(range(len(ckpts))) if ids is None else list(ids)
    if len(ids) != len(ckpts):
        raise ValueError("ids and ckpts differ in length")
    for other in ckpts[1:]:
        _require_compat(ckpts[0], other)

    members = [0]
    current = ckpts[0]
    score = float(evaluator(current))
    trace = SoupTrace(considered=[(ids[0], score, True)])
    for i in range(1, len(ckpts)):
        candidate = uniform_soup([ckpts[j] for j in members] + [ckpts[i]])
        s = float(evaluator(candidate))
        accepted = s > score
        trace.considered.append((ids[i], s, accepted))
        if accepted:
            members.append(i)
            current, score = candidate, s
    trace.final_members = [ids[j] for j in members]
    trace.final_score = score
    return current, trace
