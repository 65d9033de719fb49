"""Objectives to optimize: synthetic 1-D test functions and a toy MLP pipeline.

The toy pipeline trains a small ReLU network on two interleaved half-moons
with plain mini-batch gradient descent and snapshots its parameters, which
gives genuine, merge-compatible checkpoint sequences in a few seconds. Merge
weights are chosen on the dev split and reported on the test split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .checkpoint import Checkpoint, validate_compat
from .errors import CompatError, TrainingError
from .merge import pairwise_merge

SYNTHETIC_KINDS = ("quadratic-peak", "two-bump", "gp-sample", "plateau")

_DEFAULTS = {
    "quadratic-peak": {"peak": 0.9, "height": 0.0, "curvature": 1.0},
    "two-bump": {"c1": 0.65, "h1": 0.6, "w1": 0.05, "c2": 0.9, "h2": 1.0, "w2": 0.03},
    "gp-sample": {"variance": 1.0, "length_scale": 0.1, "n_grid": 201, "jitter": 1e-8},
    "plateau": {"center": 0.8, "half_width": 0.1, "height": 1.0, "slope": 10.0},
}


@dataclass
class SyntheticObjective:
    """Deterministic test function on [0, 1].

    ``gp-sample`` draws one function per seed from a zero-mean GP with a
    squared-exponential kernel on an ``n_grid`` point grid and interpolates
    linearly between grid points. The draw is made once and memoized.
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SYNTHETIC_KINDS:
            raise ValueError(f"unknown synthetic objective {self.kind!r}; choose from {SYNTHETIC_KINDS}")
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        self.params = {**_DEFAULTS[self.kind], **{k: float(v) for k, v in self.params.items()}}

    @cached_property
    def sample_grid(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.params
        n = int(p["n_grid"])
        xs = np.linspace(0.0, 1.0, n)
        cov = gp_sample_cov(xs, p["variance"], p["length_scale"], p["jitter"])
        chol = np.linalg.cholesky(cov)
        z = np.random.default_rng(self.seed).standard_normal(n)
        return xs, chol @ z

    def __call__(self, lam: float) -> float:
        return eval_synthetic(self, lam)

    def maximum(self, lo: float = 0.0, hi: float = 1.0, resolution: int = 10001) -> tuple[float, float]:
        """Dense-grid maximizer ``(lambda, value)`` on ``[lo, hi]``."""
        xs = np.linspace(lo, hi, resolution)
        ys = np.array([eval_synthetic(self, x) for x in xs])
        i = int(np.argmax(ys))
        return float(xs[i]), float(ys[i])


def gp_sample_cov(xs: np.ndarray, variance: float, length_scale: float, jitter: float) -> np.ndarray:
    d = xs[:, None] - xs[None, :]
    cov = variance * np.exp(-0.5 * (d / length_scale) ** 2)
    cov[np.diag_indices_from(cov)] += jitter * variance
    return cov


def eval_synthetic(obj: SyntheticObjective, lam: float) -> float:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    p = obj.params
    if obj.kind == "quadratic-peak":
        return p["height"] - p["curvature"] * (lam - p["peak"]) ** 2
    if obj.kind == "two-bump":
        b1 = p["h1"] * math.exp(-0.5 * ((lam - p["c1"]) / p["w1"]) ** 2)
        b2 = p["h2"] * math.exp(-0.5 * ((lam - p["c2"]) / p["w2"]) ** 2)
        return b1 + b2
    if obj.kind == "plateau":
        excess = max(0.0, abs(lam - p["center"]) - p["half_width"])
        return p["height"] - p["slope"] * excess * excess
    xs, ys = obj.sample_grid
    return float(np.interp(lam, xs, ys))


# -- toy classification task ---------------------------------------------------


def _moons(n: int, noise: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n0 = n - n // 2
    n1 = n // 2
    t0 = rng.uniform(0.0, math.pi, n0)
    t1 = rng.uniform(0.0, math.pi, n1)
    outer = np.column_stack([np.cos(t0), np.sin(t0)])
    inner = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    x = np.vstack([outer, inner]) + noise * rng.standard_normal((n, 2))
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    order = rng.permutation(n)
    return x[order], y[order]


@dataclass(frozen=True)
class ToyTask:
    """Two interleaved half-moons, split into train/dev/test.

    Each split is generated independently with balanced classes (class 0 gets
    the extra sample when the size is odd) and shuffled once, so "the first k
    samples" of a split is a fixed subset per seed.
    """

    n_train: int = 512
    n_dev: int = 256
    n_test: int = 2048
    noise: float = 0.25
    seed: int = 0

    @cached_property
    def splits(self) -> dict[str, tuple[np.ndarray, np.ndarray]]:
        children = np.random.SeedSequence(self.seed).spawn(3)
        sizes = {"train": self.n_train, "dev": self.n_dev, "test": self.n_test}
        return {
            name: _moons(n, self.noise, np.random.default_rng(ss))
            for (name, n), ss in zip(sizes.items(), children)
        }

    def split(self, name: str, fraction: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
        if name not in ("train", "dev", "test"):
            raise ValueError(f"unknown split {name!r}")
        if not 0.0 < fraction <= 1.0:
            raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
        x, y = self.splits[name]
        k = math.ceil(fraction * len(y))
        return x[:k], y[:k]


@dataclass(frozen=True)
class ModelConfig:
    sizes: tuple[int, ...] = (2, 16, 16, 2)

    def __post_init__(self):
        if len(self.sizes) < 2 or self.sizes[0] != 2 or self.sizes[-1] != 2:
            raise ValueError("toy MLP must map 2 inputs to 2 logits")

    @property
    def n_layers(self) -> int:
        return len(self.sizes) - 1

    def shapes(self) -> dict[str, tuple[int, ...]]:
        out = {}
        for i, (fan_in, fan_out) in enumerate(zip(self.sizes[:-1], self.sizes[1:])):
            out[f"layer{i}.bias"] = (fan_out,)
            out[f"layer{i}.weight"] = (fan_out, fan_in)
        return out

    def template(self) -> Checkpoint:
        return Checkpoint({k: np.zeros(s, dtype=np.float32) for k, s in self.shapes().items()})

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint) -> "ModelConfig":
        n = sum(1 for k in ckpt.names if k.endswith(".weight"))
        sizes = [ckpt[f"layer0.weight"].shape[1]] + [ckpt[f"layer{i}.weight"].shape[0] for i in range(n)]
        return cls(tuple(sizes))


@dataclass(frozen=True)
class SGDConfig:
    lr: float = 0.1
    steps: int = 1000
    batch_size: int = 32
    snapshot_steps: tuple[int, ...] = (900, 1000)


def init_params(cfg: ModelConfig, rng: np.random.Generator) -> dict[str, np.ndarray]:
    params = {}
    for i, (fan_in, fan_out) in enumerate(zip(cfg.sizes[:-1], cfg.sizes[1:])):
        params[f"layer{i}.weight"] = (rng.standard_normal((fan_out, fan_in)) * math.sqrt(2.0 / fan_in)).astype(
            np.float32
        )
        params[f"layer{i}.bias"] = np.zeros(fan_out, dtype=np.float32)
    return params


def forward(params, x: np.ndarray, n_layers: int, keep: bool = False):
    """Logits of the MLP; with ``keep`` also the per-layer activations."""
    h = x.astype(np.float64)
    acts = [h]
    for i in range(n_layers):
        z = h @ np.asarray(params[f"layer{i}.weight"], dtype=np.float64).T + params[f"layer{i}.bias"]
        h = np.maximum(z, 0.0) if i < n_layers - 1 else z
        acts.append(h)
    return (h, acts) if keep else h


def _softmax_xent(logits: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    z = logits - logits.max(axis=1, keepdims=True)
    p = np.exp(z)
    p /= p.sum(axis=1, keepdims=True)
    n = y.shape[0]
    loss = -float(np.mean(np.log(np.maximum(p[np.arange(n), y], 1e-300))))
    p[np.arange(n), y] -= 1.0
    return loss, p / n


def _grads(params, x, y, n_layers):
    logits, acts = forward(params, x, n_layers, keep=True)
    loss, delta = _softmax_xent(logits, y)
    grads = {}
    for i in reversed(range(n_layers)):
        grads[f"layer{i}.weight"] = delta.T @ acts[i]
        grads[f"layer{i}.bias"] = delta.sum(axis=0)
        if i:
            w = np.asarray(params[f"layer{i}.weight"], dtype=np.float64)
            delta = (delta @ w) * (acts[i] > 0.0)
    return loss, grads


def make_toy_checkpoints(
    task: ToyTask,
    model_cfg: ModelConfig = ModelConfig(),
    sgd: SGDConfig = SGDConfig(),
    seed: int = 0,
) -> list[Checkpoint]:
    """Train the toy MLP and return a checkpoint at every snapshot step.

    Step 0 is the initialization. Parameters are kept in float32 between updates,
    so each snapshot is exactly the training state at that step.
    """
    snaps = list(sgd.snapshot_steps)
    if snaps != sorted(snaps) or (snaps and (snaps[0] < 0 or snaps[-1] > sgd.steps)):
        raise ValueError("snapshot_steps must be sorted and within [0, steps]")
    rng = np.random.default_rng(seed)
    params = init_params(model_cfg, rng)
    x_train, y_train = task.split("train")
    n = y_train.shape[0]
    n_layers = model_cfg.n_layers

    out = []
    pending = list(snaps)
    order = rng.permutation(n)
    pos = 0
    for step in range(sgd.steps + 1):
        while pending and pending[0] == step:
            meta = {"step": str(step), "seed": str(seed), "task_seed": str(task.seed)}
            out.append(Checkpoint(params, meta))
            pending.pop(0)
        if step == sgd.steps:
            break
        if pos + sgd.batch_size > n:
            order = rng.permutation(n)
            pos = 0
        idx = order[pos : pos + sgd.batch_size]
        pos += sgd.batch_size
        loss, grads = _grads(params, x_train[idx], y_train[idx], n_layers)
        if not math.isfinite(loss):
            raise TrainingError(f"training loss became {loss} at step {step}")
        for k, g in grads.items():
            params[k] = (params[k] - sgd.lr * g).astype(np.float32)
    return out


def _check_model(ckpt: Checkpoint, model_cfg: ModelConfig | None) -> ModelConfig:
    if model_cfg is None:
        try:
            model_cfg = ModelConfig.from_checkpoint(ckpt)
        except (KeyError, IndexError, ValueError):
            model_cfg = ModelConfig()
    report = validate_compat(model_cfg.template(), ckpt)
    if not report.compatible:
        raise CompatError(report)
    return model_cfg


def predict(ckpt: Checkpoint, x: np.ndarray, model_cfg: ModelConfig | None = None) -> np.ndarray:
    cfg = _check_model(ckpt, model_cfg)
    return np.argmax(forward(ckpt.tensors, x, cfg.n_layers), axis=1)


def eval_model(
    ckpt: Checkpoint,
    task: ToyTask,
    split: str = "dev",
    fraction: float = 1.0,
    model_cfg: ModelConfig | None = None,
) -> float:
    """Accuracy on the first ``ceil(fraction * n)`` samples of ``split``."""
    x, y = task.split(split, fraction)
    return float(np.mean(predict(ckpt, x, model_cfg) == y))


def toy_loss(ckpt: Checkpoint, task: ToyTask, split: str = "train", model_cfg: ModelConfig | None = None) -> float:
    cfg = _check_model(ckpt, model_cfg)
    x, y = task.split(split)
    loss, _ = _softmax_xent(forward(ckpt.tensors, x, cfg.n_layers), y)
    return loss


@dataclass
class ToyEvaluator:
    """Callable ``Checkpoint -> accuracy`` bound to one task split."""

    task: ToyTask
    split: str = "dev"
    fraction: float = 1.0
    model_cfg: ModelConfig | None = None

    def __call__(self, ckpt: Checkpoint) -> float:
        return eval_model(ckpt, self.task, self.split, self.fraction, self.model_cfg)


def lambda_sweep(prev: Checkpoint, curr: Checkpoint, evaluator, resolution: int = 101, lo: float = 0.0, hi: float = 1.0):
    lams = np.linspace(lo, hi, resolution)
    scores = np.array([float(evaluator(pairwise_merge(prev, curr, float(l)))) for l in lams])
    return lams, scores


def improvement_fraction(scores: Sequence[float], f_prev: float, f_curr: float) -> float:
    """Share of swept weights whose score strictly beats both endpoints."""
    scores = np.asarray(scores, dtype=np.float64)
    return float(np.mean(scores > max(f_prev, f_curr)))
