"""Checkpoint value type and its binary container.

File layout (all integers little-endian)::

    magic      8 bytes   b"\\x89CKPTMG\\n"
    version    1 byte    currently 1
    mlen       8 bytes   uint64, byte length of the manifest
    manifest   mlen      UTF-8 JSON, keys sorted, compact separators
    payload    ...       raw float32 data of every tensor, in manifest order

The manifest is ``{"meta": {str: str}, "tensors": {name: {"shape": [...],
"offset": int, "length": int}}}`` with offsets relative to the payload start.
Tensors are stored in lexicographic name order, so equal checkpoints always
serialize to identical bytes.
"""

from __future__ import annotations

import json
import math
import os
import struct
import tempfile
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import FormatError, IoError, ValidationError

MAGIC = b"\x89CKPTMG\n"
VERSION = 1
_HEADER = struct.Struct("<8sBQ")
_DTYPE = np.dtype("<f4")


def _freeze(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.float32, order="C", copy=True)
    out.flags.writeable = False
    return out


class Checkpoint:
    """Immutable, name-ordered collection of float32 tensors.

    Parameters
    ----------
    tensors : mapping of str to array-like
        Parameter tensors. Values are copied and converted to float32.
    meta : mapping of str to str, optional
        Free-form provenance (training step, source run, ...).
    """

    __slots__ = ("_tensors", "_meta")

    def __init__(self, tensors: Mapping[str, object], meta: Mapping[str, str] | None = None):
        frozen = {}
        for name in sorted(tensors):
            if not isinstance(name, str) or not name:
                raise ValidationError(f"tensor names must be non-empty strings, got {name!r}")
            arr = _freeze(tensors[name])
            if any(d < 1 for d in arr.shape):
                raise ValidationError(f"tensor {name!r} has a zero-sized dimension: {arr.shape}")
            frozen[name] = arr
        meta = dict(meta or {})
        for k, v in meta.items():
            if not isinstance(k, str) or not isinstance(v, str):
                raise ValidationError("checkpoint meta must map str to str")
        self._tensors = frozen
        self._meta = dict(sorted(meta.items()))

    @property
    def tensors(self) -> Mapping[str, np.ndarray]:
        return self._tensors

    @property
    def meta(self) -> dict[str, str]:
        return dict(self._meta)

    @property
    def names(self) -> list[str]:
        return list(self._tensors)

    @property
    def n_elements(self) -> int:
        return int(sum(a.size for a in self._tensors.values()))

    def __getitem__(self, name: str) -> np.ndarray:
        return self._tensors[name]

    def __len__(self) -> int:
        return len(self._tensors)

    def items(self):
        return self._tensors.items()

    def shapes(self) -> dict[str, tuple[int, ...]]:
        return {k: v.shape for k, v in self._tensors.items()}

    def with_meta(self, **meta: str) -> "Checkpoint":
        merged = self.meta
        merged.update(meta)
        return Checkpoint(self._tensors, merged)

    def validate(self, allow_nonfinite: bool = False) -> None:
        """Raise ValidationError naming the first tensor with NaN/Inf data."""
        if allow_nonfinite:
            return
        for name, arr in self._tensors.items():
            if not np.isfinite(arr).all():
                bad = int(np.count_nonzero(~np.isfinite(arr)))
                raise ValidationError(f"tensor {name!r} contains {bad} non-finite element(s)")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Checkpoint):
            return NotImplemented
        if self._meta != other._meta or list(self._tensors) != list(other._tensors):
            return False
        for name, arr in self._tensors.items():
            o = other._tensors[name]
            if arr.shape != o.shape or arr.tobytes() != o.tobytes():
                return False
        return True

    __hash__ = None

    def __repr__(self) -> str:
        return f"Checkpoint({len(self)} tensors, {self.n_elements} elements)"


@dataclass(frozen=True)
class CompatReport:
    compatible: bool
    mismatches: list[tuple[str, str, str]] = field(default_factory=list)


def validate_compat(a: Checkpoint, b: Checkpoint) -> CompatReport:
    mismatches = []
    for name in sorted(set(a.names) | set(b.names)):
        if name not in b.tensors:
            mismatches.append((name, "missing-in-b", f"shape {list(a[name].shape)} only in a"))
        elif name not in a.tensors:
            mismatches.append((name, "missing-in-a", f"shape {list(b[name].shape)} only in b"))
        elif a[name].shape != b[name].shape:
            mismatches.append(
                (name, "shape-mismatch", f"{list(a[name].shape)} vs {list(b[name].shape)}")
            )
    return CompatReport(compatible=not mismatches, mismatches=mismatches)


def to_bytes(ckpt: Checkpoint) -> bytes:
    entries = {}
    offset = 0
    for name, arr in ckpt.items():
        nbytes = arr.size * _DTYPE.itemsize
        entries[name] = {"length": nbytes, "offset": offset, "shape": list(arr.shape)}
        offset += nbytes
    manifest = json.dumps(
        {"meta": ckpt.meta, "tensors": entries},
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")
    parts = [_HEADER.pack(MAGIC, VERSION, len(manifest)), manifest]
    parts.extend(arr.astype(_DTYPE, copy=False).tobytes() for _, arr in ckpt.items())
    return b"".join(parts)


def from_bytes(buf: bytes, allow_nonfinite: bool = False) -> Checkpoint:
    if len(buf) < _HEADER.size:
        raise FormatError("file too short for header")
    magic, version, mlen = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise FormatError("bad magic bytes; not a checkpoint container")
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")
    start = _HEADER.size
    if start + mlen > len(buf):
        raise FormatError("truncated manifest")
    try:
        manifest = json.loads(buf[start : start + mlen].decode("utf-8"))
        meta = manifest["meta"]
        entries = manifest["tensors"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormatError(f"unreadable manifest: {exc}") from None
    if not isinstance(entries, dict) or not isinstance(meta, dict):
        raise FormatError("manifest has wrong structure")

    payload = memoryview(buf)[start + mlen :]
    tensors = {}
    expected = 0
    for name in sorted(entries):
        e = entries[name]
        try:
            shape = tuple(int(d) for d in e["shape"])
            offset, length = int(e["offset"]), int(e["length"])
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"bad manifest entry for {name!r}") from None
        count = math.prod(shape)
        if length != count * _DTYPE.itemsize or offset != expected:
            raise FormatError(f"inconsistent layout for tensor {name!r}")
        if offset + length > len(payload):
            raise FormatError(f"truncated data for tensor {name!r}")
        data = np.frombuffer(payload, dtype=_DTYPE, count=count, offset=offset)
        tensors[name] = data.reshape(shape)
        expected += length
    if expected != len(payload):
        raise FormatError(f"{len(payload) - expected} unexpected trailing bytes")
    try:
        ckpt = Checkpoint(tensors, meta)
    except ValidationError as exc:
        raise FormatError(str(exc)) from None
    ckpt.validate(allow_nonfinite)
    return ckpt


def load_checkpoint(path, allow_nonfinite: bool = False) -> Checkpoint:
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise IoError(exc.errno, f"cannot read checkpoint: {exc.strerror}", str(path)) from exc
    return from_bytes(buf, allow_nonfinite=allow_nonfinite)


def save_checkpoint(ckpt: Checkpoint, path, allow_nonfinite: bool = False) -> None:
    """Write ``ckpt`` atomically: temp file in the target directory, then rename."""
    ckpt.validate(allow_nonfinite)
    data = to_bytes(ckpt)
    path = os.fspath(path)
    parent = os.path.dirname(os.path.abspath(path))
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(prefix=".ckpt-", dir=parent)
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        tmp = None
    except OSError as exc:
        raise IoError(exc.errno, f"cannot write checkpoint: {exc.strerror}", path) from exc
    finally:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)
