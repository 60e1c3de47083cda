"""Synthetic trace generation and the evaluation harness.

Generates labeled accelerometer and proximity traces (taps, benign
activities, wave/rub bursts), evaluates detectors over seeded corpora and
emits confusion-matrix style reports. Generators are pure functions of
their parameters and seed (numpy PCG64), so corpora are reproducible.

The naive correlation helpers at the bottom are deliberately dependency-free
double loops: they validate the production matcher, not share code with it.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .permission_engine import (
    AccessRequest,
    Decision,
    GestureDatabase,
    GesturePolicy,
    Outcome,
    PolicyKind,
    Reason,
    SensorContext,
    check_permission,
    create_template,
    decision_log_line,
    register_policy,
)
from .prox_detector import (
    DEFAULT_EPSILON_CM,
    ProxConfig,
    ProxDetectorState,
    detect_changes,
    on_change,
    run_detector,
)
from .sensor_model import (
    AccelSample,
    AccelTrace,
    ProxSample,
    ProxTrace,
    parse_accel_trace,
    parse_prox_trace,
    serialize_accel_trace,
    serialize_prox_trace,
)
from .tap_detector import GestureTemplate, match

__all__ = [
    "RNG_ALGORITHM",
    "GRAVITY_BASELINE",
    "GenParams",
    "ActivityKind",
    "ProxStreamKind",
    "gen_tap_trace",
    "gen_activity_trace",
    "gen_prox_stream",
    "gen_corpus",
    "gen_prox_corpus",
    "EvalCell",
    "EvalReport",
    "run_tap_evaluation",
    "run_prox_evaluation",
    "Scenario",
    "ScenarioRequest",
    "ScenarioResult",
    "run_scenario",
    "load_scenario",
    "write_scenario",
    "build_demo_database",
    "build_pickpocket_scenario",
    "build_legit_nfc_scenario",
    "build_legit_sms_scenario",
    "embed_trace",
    "naive_pearson",
    "naive_trace_correlation",
    "brute_force_pair_matrix",
]

RNG_ALGORITHM = "numpy-pcg64"

# rest acceleration convention: gravity on the y axis
GRAVITY_BASELINE = (0.0, 9.81, 0.0)

PROX_FAR_CM = 5.0
PROX_NEAR_CM = 0.0


@dataclass(frozen=True)
class GenParams:
    rng_seed: int = 0
    sample_rate_hz: int = 50
    window_ms: int = 2000
    noise_sigma: float = 0.3
    impulse_amplitude: float = 8.0
    impulse_width_ms: int = 200
    taps_per_window: int = 1
    prox_transition_period_ms: int = 150

    def __post_init__(self):
        if self.sample_rate_hz <= 0 or self.window_ms <= 0:
            raise ValueError("rate and window must be positive")
        if self.noise_sigma < 0 or self.impulse_amplitude < 0:
            raise ValueError("noise and amplitude must be non-negative")
        if self.impulse_width_ms <= 0 or self.prox_transition_period_ms <= 0:
            raise ValueError("widths and periods must be positive")
        if self.taps_per_window not in (1, 2, 3):
            raise ValueError(
                f"taps_per_window {self.taps_per_window} not in {{1,2,3}}")


class ActivityKind(str, Enum):
    WALKING = "walking"
    STAIRS = "stairs"
    STILL = "still"
    SCREEN_TOUCH = "screen_touch"
    PHONE_MOVEMENT = "phone_movement"


class ProxStreamKind(str, Enum):
    WAVE = "wave"
    TAP_RUB = "tap_rub"
    WALKING = "walking"
    DROP_FALL = "drop_fall"
    DAILY = "daily"
    SCREEN_TOUCH = "screen_touch"
    GAME_O1 = "game_o1"
    GAME_O2 = "game_o2"
    BUMP = "bump"


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _timeline(p: GenParams) -> np.ndarray:
    n = max(2, int(round(p.sample_rate_hz * p.window_ms / 1000.0)))
    step = 1000.0 / p.sample_rate_hz
    return np.rint(np.arange(n) * step).astype(np.int64)


def _noise_axes(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    base = np.array(GRAVITY_BASELINE).reshape(3, 1)
    return base + rng.normal(0.0, sigma, size=(3, n))


def _to_trace(t: np.ndarray, axes: np.ndarray, label: str) -> AccelTrace:
    samples = tuple(
        AccelSample(int(t[i]), float(axes[0, i]), float(axes[1, i]),
                    float(axes[2, i]))
        for i in range(len(t)))
    return AccelTrace(samples, label=label)


def _half_sine(width: int) -> np.ndarray:
    return np.sin(np.pi * (np.arange(width) + 0.5) / width)


def gen_tap_trace(p: GenParams) -> AccelTrace:
    """One 2 s tap trace: noisy rest baseline plus seeded half-sine impulses.

    The impulse is dominant on the z axis with weaker coupling on x and y,
    the way a physical knock shakes the whole device. Impulse positions use
    a small common jitter so traces from one gesture stay mutually aligned.
    """
    t = _timeline(p)
    n = len(t)
    width = max(2, int(round(p.impulse_width_ms * p.sample_rate_hz / 1000.0)))
    if width * p.taps_per_window > n:
        raise ValueError(
            f"{p.taps_per_window} impulses of {width} samples do not fit "
            f"in a {n}-sample window")
    rng = _rng(p.rng_seed)
    axes = _noise_axes(rng, n, p.noise_sigma)

    centers = [(k + 1) * n // (p.taps_per_window + 1)
               for k in range(p.taps_per_window)]
    common_jitter = int(rng.integers(-1, 2))
    pulse = _half_sine(width)
    for c in centers:
        start = c - width // 2 + common_jitter
        start = max(0, min(n - width, start))
        seg = slice(start, start + width)
        axes[2, seg] += p.impulse_amplitude * pulse
        axes[0, seg] += 0.6 * p.impulse_amplitude * pulse
        axes[1, seg] += 0.4 * p.impulse_amplitude * pulse
    return _to_trace(t, axes, f"tap_x{p.taps_per_window}")


def gen_activity_trace(kind: ActivityKind, p: GenParams) -> AccelTrace:
    """Seeded benign-activity traces used as tap-detection negatives."""
    t = _timeline(p)
    n = len(t)
    rng = _rng(p.rng_seed)
    axes = _noise_axes(rng, n, p.noise_sigma)
    secs = t / 1000.0

    if kind is ActivityKind.STILL:
        pass
    elif kind in (ActivityKind.WALKING, ActivityKind.STAIRS):
        phase = rng.uniform(0, 2 * np.pi)
        amp = 2.0
        if kind is ActivityKind.STAIRS:
            # stairs: stride-to-stride amplitude jitter
            amp = amp * (1.0 + 0.4 * rng.standard_normal(n).cumsum() / np.sqrt(n))
        axes[1] += amp * np.sin(2 * np.pi * 2.0 * secs + phase)
        axes[0] += 0.8 * np.sin(2 * np.pi * 2.0 * secs + phase + 1.1)
        axes[2] += 0.5 * np.sin(2 * np.pi * 1.0 * secs + phase + 2.3)
    elif kind is ActivityKind.SCREEN_TOUCH:
        # tiny sub-threshold blips from finger presses
        for _ in range(int(rng.integers(2, 6))):
            w = max(2, n // 25)
            start = int(rng.integers(0, n - w))
            axes[2, start:start + w] += 3.0 * p.noise_sigma * _half_sine(w)
    elif kind is ActivityKind.PHONE_MOVEMENT:
        for axis in range(3):
            f = rng.uniform(0.3, 0.9)
            phase = rng.uniform(0, 2 * np.pi)
            axes[axis] += rng.uniform(2.0, 5.0) * np.sin(2 * np.pi * f * secs + phase)
    else:
        raise ValueError(f"unknown activity kind {kind!r}")
    return _to_trace(t, axes, kind.value)


def _prox_from_change_times(change_times: Sequence[int], total_ms: int,
                            label: str) -> ProxTrace:
    """Build a near/far square wave whose transitions land at change_times."""
    samples = [ProxSample(0, PROX_FAR_CM)]
    value = PROX_FAR_CM
    for ct in change_times:
        value = PROX_NEAR_CM if value == PROX_FAR_CM else PROX_FAR_CM
        samples.append(ProxSample(int(ct), value))
    end = max(total_ms, samples[-1].t + 1)
    samples.append(ProxSample(end, value))
    return ProxTrace(tuple(samples), label=label)


def gen_prox_stream(kind: ProxStreamKind, p: GenParams) -> ProxTrace:
    """Seeded proximity streams for the wave/rub detector evaluation."""
    rng = _rng(p.rng_seed)
    period = p.prox_transition_period_ms

    if kind in (ProxStreamKind.WAVE, ProxStreamKind.TAP_RUB):
        count = 8 if kind is ProxStreamKind.WAVE else 10
        gap = period if kind is ProxStreamKind.WAVE else max(40, period * 2 // 3)
        start = int(rng.integers(1000, 4000))
        times, cur = [], start
        for _ in range(count):
            times.append(cur)
            cur += gap + int(rng.integers(-10, 11))
        return _prox_from_change_times(times, 10_000, kind.value)

    if kind in (ProxStreamKind.WALKING, ProxStreamKind.SCREEN_TOUCH):
        # sensor never triggered: steady far reading
        samples = tuple(ProxSample(i * 200, PROX_FAR_CM) for i in range(50))
        return ProxTrace(samples, label=kind.value)

    if kind is ProxStreamKind.GAME_O1:
        # thumb parked over the sensor: steady near reading
        samples = tuple(ProxSample(i * 200, PROX_NEAR_CM) for i in range(50))
        return ProxTrace(samples, label=kind.value)

    if kind in (ProxStreamKind.DROP_FALL, ProxStreamKind.BUMP):
        # one quick near pass: two changes, far below the six-change quota
        start = int(rng.integers(1000, 6000))
        dwell = int(rng.integers(100, 400))
        return _prox_from_change_times([start, start + dwell], 10_000,
                                       kind.value)

    if kind is ProxStreamKind.DAILY:
        # pocket in/out, phone to ear: sparse slow transitions
        times, cur = [], int(rng.integers(500, 1500))
        for _ in range(int(rng.integers(3, 7))):
            times.append(cur)
            cur += int(rng.integers(2000, 6000))
        return _prox_from_change_times(times, cur + 1000, kind.value)

    if kind is ProxStreamKind.GAME_O2:
        # thumb near but not over the sensor: steady slow flicker with a
        # rare fast flurry that can satisfy the six-in-1.5s condition
        times, cur = [], int(rng.integers(500, 1500))
        burst = rng.random() < 0.08
        burst_at = int(rng.integers(5, 20)) if burst else -1
        i = 0
        while cur < 20_000:
            times.append(cur)
            if i == burst_at:
                for _ in range(6):
                    cur += int(rng.integers(120, 220))
                    times.append(cur)
            cur += int(rng.integers(340, 900))
            i += 1
        return _prox_from_change_times(times, 21_000, kind.value)

    raise ValueError(f"unknown prox stream kind {kind!r}")


def gen_corpus(kind: Optional[ActivityKind], p: GenParams,
               count: int) -> list[AccelTrace]:
    """count accel traces with per-trace seeds rng_seed, rng_seed+1, ...

    kind None means tap traces (taps_per_window from params).
    """
    out = []
    for i in range(count):
        pi = replace(p, rng_seed=p.rng_seed + i)
        out.append(gen_tap_trace(pi) if kind is None
                   else gen_activity_trace(kind, pi))
    return out


def gen_prox_corpus(kind: ProxStreamKind, p: GenParams,
                    count: int) -> list[ProxTrace]:
    return [gen_prox_stream(kind, replace(p, rng_seed=p.rng_seed + i))
            for i in range(count)]


@dataclass(frozen=True)
class EvalCell:
    gesture: str
    activity: str
    matches: int
    total: int

    @property
    def rate(self) -> float:
        return self.matches / self.total


@dataclass
class EvalReport:
    cells: list[EvalCell] = field(default_factory=list)
    runtime_s: float = 0.0

    def cell(self, gesture: str, activity: str) -> EvalCell:
        for c in self.cells:
            if c.gesture == gesture and c.activity == activity:
                return c
        raise KeyError(f"no cell ({gesture!r}, {activity!r})")

    def machine_lines(self) -> list[str]:
        return [f"{c.gesture},{c.activity},{c.matches},{c.total},{c.rate:.6f}"
                for c in self.cells]

    def table(self) -> str:
        gestures = sorted({c.gesture for c in self.cells})
        activities = sorted({c.activity for c in self.cells})
        widths = [max(len("gesture"), *(len(g) for g in gestures))]
        widths += [max(len(a), 7) for a in activities]
        header = " | ".join(
            ["gesture".ljust(widths[0])]
            + [a.ljust(w) for a, w in zip(activities, widths[1:])])
        lines = [header, "-+-".join("-" * w for w in widths)]
        lookup = {(c.gesture, c.activity): c for c in self.cells}
        for g in gestures:
            row = [g.ljust(widths[0])]
            for a, w in zip(activities, widths[1:]):
                c = lookup.get((g, a))
                row.append(("" if c is None else f"{100 * c.rate:.2f}%").ljust(w))
            lines.append(" | ".join(row))
        return "\n".join(lines)


def run_tap_evaluation(templates: dict[str, GestureTemplate],
                       corpora: dict[str, Sequence[AccelTrace]]) -> EvalReport:
    """Match every corpus trace against every template; one cell per pair."""
    started = time.perf_counter()
    cells = []
    for gname, template in templates.items():
        for aname, traces in corpora.items():
            if not traces:
                raise ValueError(f"empty corpus {aname!r}")
            matches = sum(1 for tr in traces if match(tr, template).matched)
            cells.append(EvalCell(gname, aname, matches, len(traces)))
    return EvalReport(cells=cells, runtime_s=time.perf_counter() - started)


def run_prox_evaluation(corpora: dict[str, Sequence[ProxTrace]],
                        cfg: ProxConfig = ProxConfig(),
                        epsilon: float = DEFAULT_EPSILON_CM) -> EvalReport:
    """Per-corpus rate of streams that produce at least one unlock."""
    started = time.perf_counter()
    cells = []
    for aname, traces in corpora.items():
        if not traces:
            raise ValueError(f"empty corpus {aname!r}")
        unlocked = sum(
            1 for tr in traces if run_detector(tr, cfg, epsilon))
        cells.append(EvalCell("wave_rub", aname, unlocked, len(traces)))
    return EvalReport(cells=cells, runtime_s=time.perf_counter() - started)


@dataclass(frozen=True)
class ScenarioRequest:
    request: AccessRequest
    expected_outcome: Outcome
    expected_reason: Optional[Reason] = None


@dataclass(frozen=True)
class Scenario:
    label: str
    requests: tuple[ScenarioRequest, ...]
    accel: Optional[AccelTrace] = None
    prox: Optional[ProxTrace] = None


@dataclass
class ScenarioResult:
    decisions: list[tuple[AccessRequest, Decision]]
    log_lines: list[str]
    mismatches: list[str]

    @property
    def forwards(self) -> int:
        return sum(1 for _, d in self.decisions if d.outcome is Outcome.FORWARD)

    @property
    def rejects(self) -> int:
        return sum(1 for _, d in self.decisions if d.outcome is Outcome.REJECT)


def run_scenario(scenario: Scenario, db: GestureDatabase,
                 cfg: ProxConfig = ProxConfig(),
                 epsilon: float = DEFAULT_EPSILON_CM,
                 wait_forward_ms: int = 0) -> ScenarioResult:
    """Replay a scenario: feed sensor streams, decide each request in order."""
    reqs = sorted(scenario.requests, key=lambda r: r.request.t)
    changes = detect_changes(scenario.prox, epsilon) if scenario.prox else []
    state = ProxDetectorState(wind_sz=cfg.wind_sz)
    sensors = SensorContext(accel_buffer=scenario.accel,
                            wait_forward_ms=wait_forward_ms)
    ci = 0
    decisions, log_lines, mismatches = [], [], []
    for sr in reqs:
        while ci < len(changes) and changes[ci] <= sr.request.t:
            on_change(state, changes[ci], cfg)
            ci += 1
        decision = check_permission(sr.request, db, sensors, state)
        decisions.append((sr.request, decision))
        log_lines.append(decision_log_line(sr.request, decision))
        if decision.outcome is not sr.expected_outcome:
            mismatches.append(
                f"t={sr.request.t} {sr.request.service}: expected "
                f"{sr.expected_outcome.value}, got {decision.outcome.value}")
        elif (sr.expected_reason is not None
              and decision.reason is not sr.expected_reason):
            mismatches.append(
                f"t={sr.request.t} {sr.request.service}: expected reason "
                f"{sr.expected_reason.value}, got {decision.reason.value}")
    return ScenarioResult(decisions, log_lines, mismatches)


def load_scenario(path: str | os.PathLike) -> Scenario:
    """Read a scenario file; stream paths are relative to the file."""
    base = os.path.dirname(os.path.abspath(path))
    label = os.path.splitext(os.path.basename(path))[0]
    accel = prox = None
    requests: list[ScenarioRequest] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.lower().startswith("scenario:"):
                    label = body[len("scenario:"):].strip() or label
                continue
            if ":" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key: value'")
            key, _, value = line.partition(":")
            key, value = key.strip().lower(), value.strip()
            if key == "accel":
                with open(os.path.join(base, value), encoding="utf-8") as sf:
                    accel = parse_accel_trace(sf.read())
            elif key == "prox":
                with open(os.path.join(base, value), encoding="utf-8") as sf:
                    prox = parse_prox_trace(sf.read())
            elif key == "request":
                fields = [f.strip() for f in value.split(",")]
                if len(fields) not in (4, 5):
                    raise ValueError(
                        f"{path}:{lineno}: request needs "
                        f"t,app_id,service,outcome[,reason]")
                reason = Reason(fields[4]) if len(fields) == 5 else None
                requests.append(ScenarioRequest(
                    AccessRequest(fields[1], fields[2], int(fields[0])),
                    Outcome(fields[3]), reason))
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return Scenario(label=label, requests=tuple(requests),
                    accel=accel, prox=prox)


def write_scenario(scenario: Scenario, directory: str | os.PathLike,
                   name: str) -> str:
    """Write scenario + stream files into a directory; returns scenario path."""
    os.makedirs(directory, exist_ok=True)
    lines = [f"# scenario: {scenario.label}"]
    if scenario.accel is not None:
        accel_name = f"{name}_accel.csv"
        with open(os.path.join(directory, accel_name), "w",
                  encoding="utf-8") as fh:
            fh.write(serialize_accel_trace(scenario.accel))
        lines.append(f"accel: {accel_name}")
    if scenario.prox is not None:
        prox_name = f"{name}_prox.csv"
        with open(os.path.join(directory, prox_name), "w",
                  encoding="utf-8") as fh:
            fh.write(serialize_prox_trace(scenario.prox))
        lines.append(f"prox: {prox_name}")
    for sr in scenario.requests:
        parts = [str(sr.request.t), sr.request.app_id, sr.request.service,
                 sr.expected_outcome.value]
        if sr.expected_reason is not None:
            parts.append(sr.expected_reason.value)
        lines.append("request: " + ",".join(parts))
    path = os.path.join(directory, f"{name}.scenario")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def build_demo_database(seed: int = 12345, n: int = 100,
                        train_count: int = 30,
                        p: GenParams | None = None) -> GestureDatabase:
    """Database with an nfc tap policy and an sms proximity policy."""
    p = replace(p or GenParams(), rng_seed=seed)
    training = gen_corpus(None, p, train_count)
    db = GestureDatabase()
    create_template(db, "nfc_tap", training, n=n)
    register_policy(db, GesturePolicy(
        service="nfc", kind=PolicyKind.USER_DEPENDENT_TAP,
        template_id="nfc_tap"))
    register_policy(db, GesturePolicy(
        service="sms", kind=PolicyKind.USER_INDEPENDENT_PROX))
    return db


def _noise_stream(seed: int, total_ms: int, sigma: float,
                  rate_hz: int = 50) -> AccelTrace:
    rng = _rng(seed)
    n = int(round(rate_hz * total_ms / 1000.0))
    t = np.rint(np.arange(n) * 1000.0 / rate_hz).astype(np.int64)
    return _to_trace(t, _noise_axes(rng, n, sigma), "rest")


def embed_trace(stream: AccelTrace, insert: AccelTrace,
                end_ms: int) -> AccelTrace:
    """Overwrite stream values with insert's, time-shifted to end at end_ms."""
    shift = end_ms - insert.samples[-1].t
    values = {s.t + shift: (s.ax, s.ay, s.az) for s in insert.samples}
    samples = []
    for s in stream.samples:
        if s.t in values:
            ax, ay, az = values[s.t]
            samples.append(AccelSample(s.t, ax, ay, az))
        else:
            samples.append(s)
    return AccelTrace(tuple(samples), label=stream.label)


def build_pickpocket_scenario(seed: int = 777,
                              duration_ms: int = 60_000,
                              period_ms: int = 500) -> Scenario:
    """Gesture-free malware polling the NFC service; every request rejected."""
    stream = _noise_stream(seed, duration_ms + 1000, sigma=0.3)
    requests = tuple(
        ScenarioRequest(AccessRequest("com.evil.tictactoe", "nfc", t),
                        Outcome.REJECT, Reason.NO_GESTURE)
        for t in range(0, duration_ms, period_ms))
    return Scenario("pickpocket", requests, accel=stream)


def build_legit_nfc_scenario(template: GestureTemplate,
                             seed: int = 778) -> Scenario:
    """User taps the phone; the reference gesture ends exactly at request time."""
    stream = _noise_stream(seed, 10_000, sigma=0.3)
    stream = embed_trace(stream, template.reference, end_ms=5000)
    requests = (ScenarioRequest(AccessRequest("com.nfc.reader", "nfc", 5000),
                                Outcome.FORWARD, Reason.GESTURE_MATCHED),)
    return Scenario("legit_nfc", requests, accel=stream)


def build_legit_sms_scenario(seed: int = 779) -> Scenario:
    """User rubs the sensor, then the SMS request lands inside the window."""
    prox = gen_prox_stream(ProxStreamKind.TAP_RUB,
                           replace(GenParams(), rng_seed=seed))
    windows = run_detector(prox)
    if not windows:
        raise RuntimeError("rub stream produced no unlock window")
    inside = windows[-1].start + windows[-1].duration_ms // 2
    requests = (ScenarioRequest(
        AccessRequest("com.messaging", "sms", inside),
        Outcome.FORWARD, Reason.WITHIN_UNLOCK_WINDOW),)
    return Scenario("legit_sms", requests, prox=prox)


def naive_pearson(a: Sequence[float], b: Sequence[float]) -> float:
    """Independent double-loop Pearson used only to validate the fast path."""
    n = len(a)
    if n != len(b) or n < 2:
        raise ValueError("series must share a length >= 2")
    mean_a = math.fsum(a) / n
    mean_b = math.fsum(b) / n
    num_terms = []
    den_a_terms = []
    den_b_terms = []
    for i in range(n):
        da = float(a[i]) - mean_a
        db = float(b[i]) - mean_b
        num_terms.append(da * db)
        den_a_terms.append(da * da)
        den_b_terms.append(db * db)
    num = math.fsum(num_terms)
    den_a = math.fsum(den_a_terms)
    den_b = math.fsum(den_b_terms)
    if den_a == 0.0 or den_b == 0.0:
        return 0.0
    c = num / (math.sqrt(den_a) * math.sqrt(den_b))
    return max(-1.0, min(1.0, c))


def naive_trace_correlation(a: AccelTrace, b: AccelTrace,
                            rule: str = "mean") -> float:
    cs = []
    for pick in (lambda s: s.ax, lambda s: s.ay, lambda s: s.az):
        cs.append(naive_pearson([pick(s) for s in a.samples],
                                [pick(s) for s in b.samples]))
    if rule == "mean":
        return sum(cs) / 3.0
    return min(cs)


def brute_force_pair_matrix(traces: Sequence[AccelTrace],
                            rule: str = "mean") -> list[list[float]]:
    """Full m x m correlation matrix by exhaustive naive evaluation."""
    m = len(traces)
    if m < 2:
        raise ValueError(f"need >= 2 traces, got {m}")
    matrix = [[1.0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i != j:
                matrix[i][j] = naive_trace_correlation(traces[i], traces[j],
                                                       rule)
    return matrix
