"""Wave / finger-tap / rub detection from proximity sensor changes.

A cyclic buffer holds the timestamps of the last few proximity changes.
When the buffer is full and its span is under the wave time limit, the
device unlocks for a fixed window. No unlock can fire before the buffer
has seen its full quota of changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .sensor_model import ProxTrace

__all__ = [
    "ProxConfig",
    "ProxDetectorState",
    "UnlockWindow",
    "on_change",
    "is_unlocked",
    "detect_changes",
    "run_detector",
]

DEFAULT_EPSILON_CM = 0.5


@dataclass(frozen=True)
class ProxConfig:
    wind_sz: int = 6
    wave_time_limit_ms: int = 1500
    unlock_time_frame_ms: int = 1000

    def __post_init__(self):
        if self.wind_sz < 2:
            raise ValueError(f"wind_sz {self.wind_sz} must be >= 2")
        if self.wave_time_limit_ms <= 0 or self.unlock_time_frame_ms <= 0:
            raise ValueError("durations must be positive")


@dataclass(frozen=True)
class UnlockWindow:
    start: int  # ms, inclusive
    end: int    # ms, exclusive

    @property
    def duration_ms(self) -> int:
        return self.end - self.start


@dataclass
class ProxDetectorState:
    """Single-owner mutable detector state; one per sensor stream."""
    wind_sz: int = 6
    change_times: list[int] = field(default_factory=list)
    index: int = 0
    filled: int = 0
    unlock_start: Optional[int] = None
    unlock_until: Optional[int] = None

    def __post_init__(self):
        if not self.change_times:
            self.change_times = [0] * self.wind_sz

    def last_change_time(self) -> Optional[int]:
        if self.filled == 0:
            return None
        return self.change_times[(self.index - 1) % self.wind_sz]


def on_change(state: ProxDetectorState, t: int,
              cfg: ProxConfig = ProxConfig()) -> Optional[UnlockWindow]:
    """Record one proximity change at time t; returns an unlock if it fires.

    The change is written at the current cyclic index, the span against the
    oldest buffered change is tested, and the index advances. Unlocks are
    suppressed until wind_sz changes have been recorded, and a qualifying
    change during an open window extends it.
    """
    if state.wind_sz != cfg.wind_sz:
        raise ValueError(
            f"state sized for wind_sz={state.wind_sz}, config has {cfg.wind_sz}")
    last = state.last_change_time()
    if last is not None and t < last:
        raise ValueError(f"non-monotone change time {t} after {last}")

    state.change_times[state.index] = t
    oldest = state.change_times[(state.index + 1) % cfg.wind_sz]
    state.index = (state.index + 1) % cfg.wind_sz
    state.filled += 1

    if state.filled < cfg.wind_sz:
        return None
    if t - oldest >= cfg.wave_time_limit_ms:
        return None

    window = UnlockWindow(start=t, end=t + cfg.unlock_time_frame_ms)
    if state.unlock_until is not None and t <= state.unlock_until:
        # still inside (or at the edge of) the open window: extend it
        state.unlock_until = window.end
    else:
        state.unlock_start = window.start
        state.unlock_until = window.end
    return window


def is_unlocked(state: ProxDetectorState, t: int) -> bool:
    """True iff t falls in [unlock_start, unlock_until); end-exclusive."""
    if state.unlock_start is None or state.unlock_until is None:
        return False
    return state.unlock_start <= t < state.unlock_until


def detect_changes(trace: ProxTrace, epsilon: float = DEFAULT_EPSILON_CM) -> list[int]:
    """Timestamps where the reading moved by more than epsilon cm."""
    if epsilon < 0:
        raise ValueError(f"epsilon {epsilon} must be >= 0")
    out = []
    for prev, cur in zip(trace.samples, trace.samples[1:]):
        if abs(cur.value - prev.value) > epsilon:
            out.append(cur.t)
    return out


def run_detector(trace: ProxTrace, cfg: ProxConfig = ProxConfig(),
                 epsilon: float = DEFAULT_EPSILON_CM) -> list[UnlockWindow]:
    """Batch wrapper: feed every detected change through on_change in order."""
    state = ProxDetectorState(wind_sz=cfg.wind_sz)
    windows = []
    for t in detect_changes(trace, epsilon):
        w = on_change(state, t, cfg)
        if w is not None:
            windows.append(w)
    return windows
