"""Sensor sample/trace types, trace file parsing and linear resampling.

All detectors consume these immutable containers. Timestamps are integer
milliseconds since trace start; accelerations are m/s^2, proximity is cm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "AccelSample",
    "AccelTrace",
    "ProxSample",
    "ProxTrace",
    "TraceFormatError",
    "parse_accel_trace",
    "parse_prox_trace",
    "serialize_accel_trace",
    "serialize_prox_trace",
    "resample",
]


class TraceFormatError(ValueError):
    """Malformed trace input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class AccelSample:
    t: int          # ms since trace start
    ax: float
    ay: float
    az: float

    def __post_init__(self):
        object.__setattr__(self, "t", int(self.t))
        if self.t < 0:
            raise ValueError(f"negative timestamp {self.t}")
        for name in ("ax", "ay", "az"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v):
                raise ValueError(f"non-finite {name}={v}")


@dataclass(frozen=True)
class AccelTrace:
    samples: tuple[AccelSample, ...]
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if len(self.samples) < 2:
            raise ValueError("accel trace needs at least 2 samples")
        for prev, cur in zip(self.samples, self.samples[1:]):
            if cur.t <= prev.t:
                raise ValueError(
                    f"timestamps not strictly increasing at t={cur.t}")

    def __len__(self) -> int:
        return len(self.samples)

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples], dtype=np.int64)

    def axes(self) -> np.ndarray:
        """(3, n) array of ax, ay, az rows."""
        return np.array(
            [[s.ax for s in self.samples],
             [s.ay for s in self.samples],
             [s.az for s in self.samples]], dtype=np.float64)

    @property
    def duration_ms(self) -> int:
        return self.samples[-1].t - self.samples[0].t

    def slice_ms(self, start: int, end: int) -> Optional["AccelTrace"]:
        """Samples with start <= t <= end, or None if fewer than 2 remain."""
        kept = [s for s in self.samples if start <= s.t <= end]
        if len(kept) < 2:
            return None
        return AccelTrace(tuple(kept), label=self.label)


@dataclass(frozen=True)
class ProxSample:
    t: int          # ms
    value: float    # cm

    def __post_init__(self):
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "value", float(self.value))
        if self.t < 0:
            raise ValueError(f"negative timestamp {self.t}")
        if not math.isfinite(self.value) or self.value < 0:
            raise ValueError(f"invalid proximity value {self.value}")


@dataclass(frozen=True)
class ProxTrace:
    samples: tuple[ProxSample, ...]
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        for prev, cur in zip(self.samples, self.samples[1:]):
            if cur.t <= prev.t:
                raise ValueError(
                    f"timestamps not strictly increasing at t={cur.t}")

    def __len__(self) -> int:
        return len(self.samples)


def _iter_lines(text: str | Iterable[str]) -> Iterable[tuple[int, str]]:
    lines = text.split("\n") if isinstance(text, str) else text
    for lineno, raw in enumerate(lines, start=1):
        yield lineno, raw.rstrip("\n")


def _parse_rows(text: str | Iterable[str], ncols: int):
    """Yield (lineno, fields) for data rows; returns the optional label tag."""
    label = None
    rows = []
    for lineno, line in _iter_lines(text):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped.lstrip("#").strip()
            if body.lower().startswith("label:"):
                label = body[len("label:"):].strip() or None
            continue
        fields = [f.strip() for f in stripped.split(",")]
        if len(fields) != ncols:
            raise TraceFormatError(
                f"expected {ncols} columns, got {len(fields)}", lineno)
        rows.append((lineno, fields))
    return label, rows


def _parse_int_ms(field: str, lineno: int) -> int:
    try:
        return int(field)
    except ValueError:
        raise TraceFormatError(f"non-integer timestamp {field!r}", lineno)


def _parse_float(field: str, name: str, lineno: int) -> float:
    try:
        v = float(field)
    except ValueError:
        raise TraceFormatError(f"non-numeric {name} {field!r}", lineno)
    if not math.isfinite(v):
        raise TraceFormatError(f"non-finite {name} {field!r}", lineno)
    return v


def parse_accel_trace(text: str | Iterable[str]) -> AccelTrace:
    """Parse `t_ms,ax,ay,az` rows ('#' comments ignored) into an AccelTrace."""
    label, rows = _parse_rows(text, 4)
    samples = []
    last_t = None
    for lineno, fields in rows:
        t = _parse_int_ms(fields[0], lineno)
        if t < 0:
            raise TraceFormatError(f"negative timestamp {t}", lineno)
        if last_t is not None and t <= last_t:
            raise TraceFormatError(
                f"non-increasing timestamp {t} (previous {last_t})", lineno)
        last_t = t
        ax = _parse_float(fields[1], "ax", lineno)
        ay = _parse_float(fields[2], "ay", lineno)
        az = _parse_float(fields[3], "az", lineno)
        samples.append(AccelSample(t, ax, ay, az))
    if len(samples) < 2:
        raise TraceFormatError(f"trace has {len(samples)} samples, need >= 2")
    return AccelTrace(tuple(samples), label=label)


def parse_prox_trace(text: str | Iterable[str]) -> ProxTrace:
    """Parse `t_ms,value_cm` rows into a ProxTrace."""
    label, rows = _parse_rows(text, 2)
    samples = []
    last_t = None
    for lineno, fields in rows:
        t = _parse_int_ms(fields[0], lineno)
        if t < 0:
            raise TraceFormatError(f"negative timestamp {t}", lineno)
        if last_t is not None and t <= last_t:
            raise TraceFormatError(
                f"non-increasing timestamp {t} (previous {last_t})", lineno)
        last_t = t
        v = _parse_float(fields[1], "value", lineno)
        if v < 0:
            raise TraceFormatError(f"negative proximity value {v}", lineno)
        samples.append(ProxSample(t, v))
    if not samples:
        raise TraceFormatError("empty trace")
    return ProxTrace(tuple(samples), label=label)


def serialize_accel_trace(trace: AccelTrace) -> str:
    """Inverse of parse_accel_trace; floats use repr so round-trips are exact."""
    lines = []
    if trace.label is not None:
        lines.append(f"# label: {trace.label}")
    for s in trace.samples:
        lines.append(f"{s.t},{s.ax!r},{s.ay!r},{s.az!r}")
    return "\n".join(lines) + "\n"


def serialize_prox_trace(trace: ProxTrace) -> str:
    lines = []
    if trace.label is not None:
        lines.append(f"# label: {trace.label}")
    for s in trace.samples:
        lines.append(f"{s.t},{s.value!r}")
    return "\n".join(lines) + "\n"


def resample(trace: AccelTrace, n: int) -> AccelTrace:
    """Resample to n uniform timestamps over the original span.

    Each axis is linearly interpolated; endpoints are preserved exactly.
    The uniform grid is rounded to integer milliseconds, so the span must be
    at least n-1 ms to keep timestamps strictly increasing.
    """
    if n < 2:
        raise ValueError(f"resample target n={n} must be >= 2")
    t = trace.times()
    t0, t1 = int(t[0]), int(t[-1])
    if t1 - t0 < n - 1:
        raise ValueError(
            f"trace span {t1 - t0} ms too short for {n} integer-ms samples")
    grid = np.rint(t0 + (t1 - t0) * np.arange(n) / (n - 1)).astype(np.int64)
    axes = trace.axes()
    out = np.empty((3, n))
    for k in range(3):
        out[k] = np.interp(grid, t, axes[k])
    samples = tuple(
        AccelSample(int(grid[i]), out[0, i], out[1, i], out[2, i])
        for i in range(n))
    return AccelTrace(samples, label=trace.label)
