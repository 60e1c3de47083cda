import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twr.prox_detector import (
    ProxConfig,
    ProxDetectorState,
    UnlockWindow,
    detect_changes,
    is_unlocked,
    on_change,
    run_detector,
)
from twr.sensor_model import ProxSample, ProxTrace


def feed(times, cfg=ProxConfig()):
    state = ProxDetectorState(wind_sz=cfg.wind_sz)
    windows = []
    for t in times:
        w = on_change(state, t, cfg)
        if w is not None:
            windows.append(w)
    return state, windows


class TestOnChange:
    def test_six_changes_inside_limit(self):
        state, windows = feed([0, 200, 400, 600, 800, 1000])
        assert windows == [UnlockWindow(1000, 2000)]

    def test_six_changes_spanning_limit(self):
        _, windows = feed([0, 400, 800, 1200, 1600, 2000])
        assert windows == []

    def test_five_changes_never_unlock(self):
        _, windows = feed([0, 10, 20, 30, 40])
        assert windows == []

    def test_boundary_span_is_exclusive(self):
        # span exactly equal to the limit does not unlock
        _, windows = feed([0, 100, 200, 300, 400, 1500])
        assert windows == []
        _, windows = feed([0, 100, 200, 300, 400, 1499])
        assert windows == [UnlockWindow(1499, 2499)]

    def test_seventh_change_uses_cyclic_window(self):
        # first six span too long, but changes 2..7 fit inside the limit
        _, windows = feed([0, 1600, 1700, 1800, 1900, 2000, 2100])
        assert windows == [UnlockWindow(2100, 3100)]

    def test_open_window_extends(self):
        state, windows = feed([0, 100, 200, 300, 400, 500, 900])
        assert windows == [UnlockWindow(500, 1500), UnlockWindow(900, 1900)]
        assert state.unlock_start == 500
        assert state.unlock_until == 1900

    def test_non_monotone_rejected(self):
        state, _ = feed([0, 100])
        with pytest.raises(ValueError):
            on_change(state, 50)

    def test_mismatched_config_rejected(self):
        state = ProxDetectorState(wind_sz=4)
        with pytest.raises(ValueError):
            on_change(state, 0, ProxConfig(wind_sz=6))


class TestIsUnlocked:
    def test_inside_window(self):
        state, _ = feed([0, 200, 400, 600, 800, 1000])
        assert is_unlocked(state, 1999)

    def test_end_exclusive(self):
        state, _ = feed([0, 200, 400, 600, 800, 1000])
        assert not is_unlocked(state, 2000)

    def test_start_inclusive(self):
        state, _ = feed([0, 200, 400, 600, 800, 1000])
        assert is_unlocked(state, 1000)

    def test_fresh_state(self):
        assert not is_unlocked(ProxDetectorState(), 12345)


def prox(values, step=10):
    return ProxTrace(tuple(
        ProxSample(i * step, float(v)) for i, v in enumerate(values)))


class TestDetectChanges:
    def test_two_transitions(self):
        trace = prox([5, 5, 0, 0, 5])
        assert detect_changes(trace, 0.5) == [20, 40]

    def test_constant(self):
        assert detect_changes(prox([3, 3, 3, 3]), 0.5) == []

    def test_alternating(self):
        trace = prox([0, 5] * 6, step=100)
        assert detect_changes(trace, 0.5) == list(range(100, 1200, 100))

    def test_epsilon_is_strict(self):
        trace = prox([0, 0.5, 1.0])
        assert detect_changes(trace, 0.5) == []
        assert detect_changes(trace, 0.49) == [10, 20]


class TestRunDetector:
    def test_wave_burst(self):
        # 7 transitions at 200 ms pitch: hand execution unlocks at the 6th
        # and again at the 7th (still inside the open window)
        trace = prox([5, 0, 5, 0, 5, 0, 5, 0], step=200)
        windows = run_detector(trace)
        assert windows == [UnlockWindow(1200, 2200), UnlockWindow(1400, 2400)]

    def test_constant_trace(self):
        assert run_detector(prox([5] * 20, step=300)) == []

    def test_matches_manual_composition(self):
        rng = np.random.default_rng(5)
        values = rng.choice([0.0, 5.0], size=60)
        trace = prox(values, step=130)
        windows = run_detector(trace)
        _, manual = feed(detect_changes(trace, 0.5))
        assert windows == manual


def oracle_unlocks(times, cfg=ProxConfig()):
    """Brute force: an unlock fires at change i iff the wind_sz-change span
    ending at i is under the limit."""
    k = cfg.wind_sz
    return [times[i] for i in range(len(times))
            if i >= k - 1 and times[i] - times[i - k + 1] < cfg.wave_time_limit_ms]


class TestAgainstSpanOracle:
    @given(st.lists(st.integers(1, 800), min_size=0, max_size=60),
           st.integers(2, 8))
    @settings(max_examples=150)
    def test_unlock_times_match_oracle(self, gaps, wind_sz):
        cfg = ProxConfig(wind_sz=wind_sz)
        times = []
        cur = 0
        for g in gaps:
            cur += g
            times.append(cur)
        _, windows = feed(times, cfg)
        assert [w.start for w in windows] == oracle_unlocks(times, cfg)
        assert all(w.duration_ms == cfg.unlock_time_frame_ms for w in windows)

    def test_large_randomized_stream(self):
        rng = np.random.default_rng(99)
        times = np.cumsum(rng.integers(1, 700, size=10_000)).tolist()
        _, windows = feed(times)
        assert [w.start for w in windows] == oracle_unlocks(times)
