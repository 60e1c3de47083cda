"""Phone-tap recognition from accelerometer traces.

Matching is per-axis Pearson correlation between an observed window and a
stored reference trace, combined across axes by a configurable rule. The
decision threshold is the minimum pairwise correlation over the training set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .sensor_model import AccelTrace, resample

__all__ = [
    "AxisRule",
    "GestureTemplate",
    "MatchResult",
    "pearson",
    "trace_correlation",
    "cross_correlation",
    "compute_threshold",
    "build_template",
    "match",
    "scan_stream",
]


class AxisRule(str, Enum):
    """How the three per-axis correlations combine into a single score."""
    MEAN = "mean"
    MIN = "min"
    ALL_AXES = "all_axes"


@dataclass(frozen=True)
class GestureTemplate:
    reference: AccelTrace
    n: int
    threshold: float
    axis_rule: AxisRule = AxisRule.MEAN
    created_from: int = 2

    def __post_init__(self):
        if not -1.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [-1, 1]")
        if len(self.reference) != self.n:
            raise ValueError(
                f"reference length {len(self.reference)} != n={self.n}")
        if self.created_from < 2:
            raise ValueError("template needs >= 2 training traces")


@dataclass(frozen=True)
class MatchResult:
    score: float
    matched: bool
    offset: int = 0


def pearson(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Pearson correlation of two equal-length series, clamped to [-1, 1].

    A zero-variance series has no shape to compare; the result is defined
    as 0 so a motionless signal never matches anything.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"series shapes differ: {a.shape} vs {b.shape}")
    if a.size < 2:
        raise ValueError("series need at least 2 points")
    # math.fsum gives correctly rounded sums, so scores are reproducible
    # bit for bit regardless of vectorization or summation order
    da = a - math.fsum(a.tolist()) / a.size
    db = b - math.fsum(b.tolist()) / b.size
    na = math.sqrt(math.fsum((da * da).tolist()))
    nb = math.sqrt(math.fsum((db * db).tolist()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    c = math.fsum((da * db).tolist()) / (na * nb)
    return max(-1.0, min(1.0, c))


def _combine(cx: float, cy: float, cz: float, rule: AxisRule) -> float:
    if rule is AxisRule.MEAN:
        return (cx + cy + cz) / 3.0
    # MIN and ALL_AXES both reduce to the worst axis.
    return min(cx, cy, cz)


def trace_correlation(a: AccelTrace, b: AccelTrace,
                      axis_rule: AxisRule = AxisRule.MEAN) -> float:
    """Combined per-axis correlation of two equal-length traces."""
    if len(a) != len(b):
        raise ValueError(f"trace lengths differ: {len(a)} vs {len(b)}")
    pa, pb = a.axes(), b.axes()
    return _combine(pearson(pa[0], pb[0]),
                    pearson(pa[1], pb[1]),
                    pearson(pa[2], pb[2]), axis_rule)


def cross_correlation(a: AccelTrace, template: GestureTemplate) -> float:
    """Similarity score of a trace (already resampled to template.n)."""
    return trace_correlation(a, template.reference, template.axis_rule)


def compute_threshold(traces: Sequence[AccelTrace],
                      axis_rule: AxisRule = AxisRule.MEAN) -> float:
    """Minimum pairwise correlation over all unordered pairs of traces."""
    if len(traces) < 2:
        raise ValueError(f"need >= 2 traces, got {len(traces)}")
    lengths = {len(t) for t in traces}
    if len(lengths) != 1:
        raise ValueError(f"traces have mixed lengths {sorted(lengths)}")
    return min(
        trace_correlation(traces[i], traces[j], axis_rule)
        for i in range(len(traces))
        for j in range(i + 1, len(traces)))


def build_template(traces: Sequence[AccelTrace], n: int = 100,
                   axis_rule: AxisRule = AxisRule.MEAN) -> GestureTemplate:
    """Build a template from training traces.

    All traces are resampled to n points. The reference is the medoid (the
    trace with the highest mean correlation to the others); the threshold is
    the minimum pairwise correlation.
    """
    if len(traces) < 2:
        raise ValueError(f"need >= 2 training traces, got {len(traces)}")
    rs = [resample(t, n) for t in traces]
    m = len(rs)
    means = []
    for i in range(m):
        total = sum(trace_correlation(rs[i], rs[j], axis_rule)
                    for j in range(m) if j != i)
        means.append(total / (m - 1))
    medoid = int(np.argmax(means))
    threshold = compute_threshold(rs, axis_rule)
    return GestureTemplate(reference=rs[medoid], n=n, threshold=threshold,
                           axis_rule=axis_rule, created_from=m)


def match(a: AccelTrace, template: GestureTemplate) -> MatchResult:
    """Match a trace against a template; the threshold test is inclusive."""
    score = cross_correlation(resample(a, template.n), template)
    return MatchResult(score=score, matched=score >= template.threshold)


def scan_stream(buffer: AccelTrace, template: GestureTemplate,
                stride: int | None = None) -> list[MatchResult]:
    """Slide a template-length window over a recording buffer.

    Returns matched windows only, each tagged with its start sample offset.
    Overlapping detections within one window length are coalesced to the
    highest-scoring one.
    """
    t = buffer.times()
    dt = (t[-1] - t[0]) / (len(buffer) - 1)
    window = max(2, int(round(template.reference.duration_ms / dt)) + 1)
    if len(buffer) < window:
        raise ValueError(
            f"buffer of {len(buffer)} samples shorter than one "
            f"{window}-sample template window")
    if stride is None:
        # score falls off sharply with window misalignment, so the default
        # walks every offset; pass a larger stride to trade recall for speed
        stride = 1
    if stride < 1:
        raise ValueError(f"stride {stride} must be >= 1")

    last = len(buffer) - window
    offsets = list(range(0, last + 1, stride))
    if offsets[-1] != last:
        offsets.append(last)  # a gesture ending at the buffer edge still scans
    hits: list[MatchResult] = []
    for start in offsets:
        sub = AccelTrace(buffer.samples[start:start + window])
        res = match(sub, template)
        if res.matched:
            hits.append(MatchResult(res.score, True, offset=start))

    # non-maximum suppression within one window length
    kept: list[MatchResult] = []
    for h in sorted(hits, key=lambda r: (-r.score, r.offset)):
        if all(abs(h.offset - k.offset) >= window for k in kept):
            kept.append(h)
    kept.sort(key=lambda r: r.offset)
    return kept
