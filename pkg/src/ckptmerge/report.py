"""Versioned JSON run reports.

Everything except the ``timing`` block is a pure function of the inputs and
flags, so two identical invocations produce identical reports once ``timing``
is dropped.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class RunReport:
    command: str
    config: dict
    seed: int
    trace: list[dict] = field(default_factory=list)
    best_lambda: float | None = None
    best_value: float | None = None
    per_step_best: list[float] = field(default_factory=list)
    hedge_log: list[dict] = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)
    status: str = "ok"
    error: str | None = None
    timing: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_result(cls, command: str, config: dict, seed: int, result, **extra) -> "RunReport":
        d = result.to_dict()
        return cls(
            command=command,
            config=config,
            seed=seed,
            trace=d["trace"],
            best_lambda=d["best_lambda"] if d["trace"] else None,
            best_value=d["best_value"] if d["trace"] else None,
            per_step_best=d["per_step_best"],
            hedge_log=d["hedge_log"],
            **extra,
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, tuple)):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_report(report: RunReport, path) -> None:
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    os.replace(tmp, path)


def load_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema {data.get('schema_version')!r}")
    return data


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
