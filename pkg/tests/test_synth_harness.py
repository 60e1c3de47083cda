from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from twr.permission_engine import Outcome, Reason
from twr.prox_detector import ProxConfig, run_detector
from twr.sensor_model import resample
from twr.synth_harness import (
    ActivityKind,
    EvalCell,
    GenParams,
    ProxStreamKind,
    Scenario,
    brute_force_pair_matrix,
    build_demo_database,
    build_legit_nfc_scenario,
    build_legit_sms_scenario,
    build_pickpocket_scenario,
    gen_activity_trace,
    gen_corpus,
    gen_prox_corpus,
    gen_prox_stream,
    gen_tap_trace,
    load_scenario,
    run_prox_evaluation,
    run_scenario,
    run_tap_evaluation,
    write_scenario,
)
from twr.tap_detector import trace_correlation


class TestGenerators:
    def test_tap_trace_is_deterministic(self):
        p = GenParams(rng_seed=42)
        assert gen_tap_trace(p) == gen_tap_trace(p)

    def test_different_seeds_differ(self):
        assert gen_tap_trace(GenParams(rng_seed=1)) != gen_tap_trace(
            GenParams(rng_seed=2))

    def test_zero_amplitude_is_pure_noise(self):
        p = GenParams(rng_seed=5, impulse_amplitude=0.0)
        trace = gen_tap_trace(p)
        z = trace.axes()[2]
        assert np.abs(z).max() < 6 * p.noise_sigma

    def test_window_shape(self):
        trace = gen_tap_trace(GenParams(rng_seed=0))
        assert len(trace) == 100
        assert trace.samples[0].t == 0
        assert trace.samples[-1].t == 1980

    def test_three_taps_three_peaks(self):
        p = GenParams(rng_seed=42, taps_per_window=3)
        trace = gen_tap_trace(p)
        z = trace.axes()[2]
        width = round(p.impulse_width_ms * p.sample_rate_hz / 1000)
        # count local maxima above 3 sigma, at least one pulse width apart
        level = 3 * p.noise_sigma
        peaks = []
        for i in np.argsort(z)[::-1]:
            if z[i] > level and all(abs(i - j) >= width for j in peaks):
                peaks.append(i)
        assert len(peaks) == 3

    def test_impulses_must_fit(self):
        with pytest.raises(ValueError):
            gen_tap_trace(GenParams(rng_seed=0, impulse_width_ms=900,
                                    taps_per_window=3))

    def test_activity_traces_deterministic(self):
        for kind in ActivityKind:
            p = GenParams(rng_seed=7)
            assert gen_activity_trace(kind, p) == gen_activity_trace(kind, p)

    def test_prox_streams_deterministic(self):
        for kind in ProxStreamKind:
            p = GenParams(rng_seed=7)
            assert gen_prox_stream(kind, p) == gen_prox_stream(kind, p)

    def test_wave_burst_unlocks(self):
        trace = gen_prox_stream(ProxStreamKind.WAVE, GenParams(rng_seed=3))
        assert len(run_detector(trace)) >= 1

    def test_game_o1_never_unlocks(self):
        for seed in range(20):
            trace = gen_prox_stream(ProxStreamKind.GAME_O1,
                                    GenParams(rng_seed=seed))
            assert run_detector(trace) == []

    def test_corpus_seeding_is_per_trace(self):
        corpus = gen_corpus(None, GenParams(rng_seed=10), 3)
        assert corpus[0] != corpus[1]
        again = gen_corpus(None, GenParams(rng_seed=10), 3)
        assert corpus == again


class TestEvalReports:
    def test_rates_are_exact_ratios(self, tap_template, fresh_taps):
        report = run_tap_evaluation({"tap": tap_template},
                                    {"fresh": fresh_taps[:37]})
        cell = report.cell("tap", "fresh")
        assert cell.total == 37
        assert Fraction(cell.matches, cell.total) == Fraction(
            cell.rate).limit_denominator(37)

    def test_self_replay_rate_is_one(self, tap_template, tap_training):
        report = run_tap_evaluation({"tap": tap_template},
                                    {"train": tap_training})
        assert report.cell("tap", "train").rate == 1.0

    def test_empty_corpus_rejected(self, tap_template):
        with pytest.raises(ValueError):
            run_tap_evaluation({"tap": tap_template}, {"empty": []})

    def test_prox_report_cells(self):
        corpora = {
            "wave": gen_prox_corpus(ProxStreamKind.WAVE,
                                    GenParams(rng_seed=1), 10),
            "daily": gen_prox_corpus(ProxStreamKind.DAILY,
                                     GenParams(rng_seed=2), 10),
        }
        report = run_prox_evaluation(corpora)
        assert report.cell("wave_rub", "wave").rate == 1.0
        assert report.cell("wave_rub", "daily").rate == 0.0

    def test_machine_lines_and_table(self, tap_template, fresh_taps):
        report = run_tap_evaluation({"tap": tap_template},
                                    {"fresh": fresh_taps[:10]})
        line = report.machine_lines()[0]
        assert line.startswith("tap,fresh,")
        assert "tap" in report.table()

    def test_unknown_cell_raises(self):
        report = run_prox_evaluation({
            "wave": gen_prox_corpus(ProxStreamKind.WAVE,
                                    GenParams(rng_seed=1), 2)})
        with pytest.raises(KeyError):
            report.cell("wave_rub", "nope")


class TestBruteForceMatrix:
    def test_unit_diagonal_and_symmetry(self, tap_training):
        traces = [resample(t, 100) for t in tap_training[:8]]
        matrix = brute_force_pair_matrix(traces)
        m = len(traces)
        for i in range(m):
            assert matrix[i][i] == 1.0
            for j in range(m):
                assert abs(matrix[i][j] - matrix[j][i]) <= 1e-12

    def test_agrees_with_production_path(self, tap_training):
        traces = [resample(t, 100) for t in tap_training[:8]]
        matrix = brute_force_pair_matrix(traces)
        for i in range(len(traces)):
            for j in range(len(traces)):
                if i != j:
                    assert matrix[i][j] == pytest.approx(
                        trace_correlation(traces[i], traces[j]), abs=1e-9)


@pytest.fixture(scope="module")
def demo_db():
    return build_demo_database(seed=12345)


class TestScenarios:
    def test_pickpocket_all_rejected(self, demo_db):
        scenario = build_pickpocket_scenario()
        result = run_scenario(scenario, demo_db)
        assert len(result.decisions) == 120
        assert result.forwards == 0
        assert result.rejects == 120
        assert result.mismatches == []

    def test_legit_nfc_forwarded_with_reason(self, demo_db):
        scenario = build_legit_nfc_scenario(demo_db.templates["nfc_tap"])
        result = run_scenario(scenario, demo_db)
        assert result.mismatches == []
        _, decision = result.decisions[0]
        assert decision.outcome is Outcome.FORWARD
        assert decision.reason is Reason.GESTURE_MATCHED

    def test_legit_sms_forwarded_within_window(self, demo_db):
        scenario = build_legit_sms_scenario()
        result = run_scenario(scenario, demo_db)
        assert result.mismatches == []
        _, decision = result.decisions[0]
        assert decision.reason is Reason.WITHIN_UNLOCK_WINDOW

    def test_replay_is_deterministic(self, demo_db):
        scenario = build_pickpocket_scenario()
        first = run_scenario(scenario, demo_db)
        second = run_scenario(scenario, demo_db)
        assert first.log_lines == second.log_lines

    def test_mismatch_reported(self, demo_db):
        scenario = build_pickpocket_scenario()
        flipped = Scenario(
            scenario.label,
            tuple(replace(sr, expected_outcome=Outcome.FORWARD)
                  for sr in scenario.requests[:1]),
            accel=scenario.accel)
        result = run_scenario(flipped, demo_db)
        assert len(result.mismatches) == 1

    def test_scenario_file_round_trip(self, demo_db, tmp_path):
        scenario = build_legit_sms_scenario()
        path = write_scenario(scenario, tmp_path, "sms")
        loaded = load_scenario(path)
        assert loaded == scenario

    def test_malformed_scenario_file(self, tmp_path):
        path = tmp_path / "bad.scenario"
        path.write_text("request: not-enough-fields\n")
        with pytest.raises(ValueError):
            load_scenario(path)
