import math

import numpy as np
import pytest

from gsmloc.errors import ConfigError, InsufficientMeasurementsError
from gsmloc.geometry import Point3, TowerSite, distance, hex_cell_layout
from gsmloc.simulator import (
    EventKind,
    ScenarioConfig,
    first_k_acks,
    format_trace,
    measurement_csv,
    run_scenario,
    run_trials,
)
from gsmloc.timing import SPEED_OF_LIGHT, TimingModel

RIGHT_TRIANGLE = (
    TowerSite(0, Point3(0, 0, 0)),
    TowerSite(1, Point3(10, 0, 0)),
    TowerSite(2, Point3(0, 10, 0)),
)


def basic_config(**overrides):
    defaults = dict(
        towers=RIGHT_TRIANGLE,
        mobile_true_position=Point3(3, 4, 0),
        timing=TimingModel(),
    )
    defaults.update(overrides)
    return ScenarioConfig(**defaults)


class TestRunScenario:
    def test_exact_geometry_round_trip(self):
        trace, measurements, fix = run_scenario(basic_config())
        by_id = {m.tower.id: m.range_m for m in measurements}
        assert by_id[0] == pytest.approx(5.0, rel=1e-12)
        assert by_id[1] == pytest.approx(math.sqrt(65.0), rel=1e-12)
        assert by_id[2] == pytest.approx(math.sqrt(45.0), rel=1e-12)
        assert fix.position.x == pytest.approx(3.0, abs=1e-9)
        assert fix.position.y == pytest.approx(4.0, abs=1e-9)
        assert fix.position.z == pytest.approx(0.0, abs=1e-9)

    def test_acks_ordered_by_distance(self):
        _, measurements, _ = run_scenario(basic_config())
        # nearest tower's signal returns first: 5 < sqrt(45) < sqrt(65)
        assert [m.tower.id for m in measurements] == [0, 2, 1]

    def test_mobile_on_tower(self):
        config = basic_config(mobile_true_position=Point3(10, 0, 0))
        _, measurements, _ = run_scenario(config)
        assert measurements[0].tower.id == 1
        assert measurements[0].range_m == 0.0

    def test_event_times(self):
        config = basic_config(tower_processing_delay=1e-6)
        trace, _, _ = run_scenario(config)
        c = SPEED_OF_LIGHT
        for event in trace.events:
            tower = next(t for t in RIGHT_TRIANGLE if t.id == event.tower_id)
            d = distance(Point3(3, 4, 0), tower.position)
            if event.kind is EventKind.REQUEST_ARRIVES:
                assert event.time == pytest.approx(d / c, rel=1e-12)
            else:
                assert event.time == pytest.approx(2 * d / c + 1e-6, rel=1e-12)

    def test_ack_echoes_request_timestamp(self):
        config = basic_config(request_time=2.5)
        trace, _, _ = run_scenario(config)
        for event in trace.events:
            if event.kind is EventKind.ACK_ARRIVES:
                assert event.payload.timestamp == 2.5

    def test_processing_delay_recovered_with_matching_alpha(self):
        config = basic_config(
            tower_processing_delay=1e-6,
            timing=TimingModel(alpha=1e-6),
        )
        _, measurements, fix = run_scenario(config)
        assert fix.position.x == pytest.approx(3.0, abs=1e-9)
        assert measurements[0].range_m == pytest.approx(5.0, rel=1e-9)

    def test_coarse_clock_degenerates_like_real_hardware(self):
        # all towers within 150 m: every round trip quantizes to the same
        # value on a 1 us clock, so the ranges carry no information
        config = basic_config(timing=TimingModel(clock_resolution=1e-6))
        _, measurements, fix = run_scenario(config)
        assert len({m.range_m for m in measurements}) == 1
        assert max(fix.residuals) > 1.0

    def test_insufficient_acks_with_total_loss(self):
        config = basic_config(packet_loss=1.0)
        with pytest.raises(InsufficientMeasurementsError):
            run_scenario(config)

    def test_loss_is_reproducible_per_trial(self):
        config = basic_config(
            towers=tuple(hex_cell_layout(Point3(0, 0, 0), 1000.0, 2)),
            mobile_true_position=Point3(120.0, -40.0, 0.0),
            packet_loss=0.35,
            rng_seed=7,
        )
        first = run_scenario(config, trial_index=3)
        second = run_scenario(config, trial_index=3)
        assert format_trace(first[0]) == format_trace(second[0])


class TestDeterminism:
    def test_trace_bytes_identical_across_runs(self):
        config = basic_config(rng_seed=42)
        a = format_trace(run_scenario(config)[0])
        b = format_trace(run_scenario(config)[0])
        assert a == b

    def test_trace_is_time_sorted_with_id_tiebreak(self):
        # four towers equidistant from the mobile: acks tie, ids break it
        towers = (
            TowerSite(3, Point3(5, 0, 0)),
            TowerSite(1, Point3(-5, 0, 0)),
            TowerSite(2, Point3(0, 5, 0)),
            TowerSite(0, Point3(0, -5, 0)),
        )
        config = ScenarioConfig(towers=towers, mobile_true_position=Point3(0, 0, 0))
        trace, measurements, _ = run_scenario(config)
        times = [e.time for e in trace.events]
        assert times == sorted(times)
        acks = [e.tower_id for e in trace.events if e.kind is EventKind.ACK_ARRIVES]
        assert acks == [0, 1, 2, 3]
        assert [m.tower.id for m in measurements] == [0, 1, 2]

    def test_run_trials_is_pure_per_index(self):
        config = basic_config(
            towers=tuple(hex_cell_layout(Point3(0, 0, 0), 800.0, 2)),
            mobile_true_position=Point3(90, -50, 0),
            trials=4,
            packet_loss=0.2,
            rng_seed=11,
        )
        results = run_trials(config)
        assert len(results) == 4
        again = [run_scenario(config, trial_index=i) for i in range(4)]
        for (t1, _, _), (t2, _, _) in zip(results, again):
            assert format_trace(t1) == format_trace(t2)


class TestFirstKAcks:
    def test_all_six_in_distance_order(self):
        towers = tuple(hex_cell_layout(Point3(50, 0, 0), 200.0, 1))
        config = ScenarioConfig(towers=towers, mobile_true_position=Point3(120, 30, 0))
        trace, _, _ = run_scenario(config)
        measurements = first_k_acks(trace, 6)
        dists = [m.range_m for m in measurements]
        assert dists == sorted(dists)
        expected = sorted(
            towers, key=lambda t: distance(Point3(120, 30, 0), t.position)
        )
        assert [m.tower.id for m in measurements] == [t.id for t in expected[:6]]

    def test_nearest_three_from_hex_cell(self):
        towers = tuple(hex_cell_layout(Point3(0, 0, 0), 500.0, 1))
        mobile = Point3(100, 60, 0)
        config = ScenarioConfig(towers=towers, mobile_true_position=mobile)
        trace, measurements, _ = run_scenario(config)
        nearest = sorted(towers, key=lambda t: distance(mobile, t.position))[:3]
        assert {m.tower.id for m in measurements} == {t.id for t in nearest}

    def test_k_below_three_rejected(self):
        trace, _, _ = run_scenario(basic_config())
        with pytest.raises(ValueError):
            first_k_acks(trace, 2)

    def test_k_beyond_acks_rejected(self):
        trace, _, _ = run_scenario(basic_config())
        with pytest.raises(InsufficientMeasurementsError):
            first_k_acks(trace, 4)


class TestQuantizationDegradation:
    def test_mean_error_nondecreasing_smoke(self):
        towers = tuple(hex_cell_layout(Point3(0, 0, 0), 3000.0, 1))
        rng = np.random.default_rng(2024)
        mobiles = [
            Point3(*(rng.uniform(-1200, 1200, size=2)), 0.0) for _ in range(40)
        ]
        means = []
        for resolution in (0.0, 1e-9, 1e-8, 1e-7):
            errors = []
            for mobile in mobiles:
                config = ScenarioConfig(
                    towers=towers,
                    mobile_true_position=mobile,
                    timing=TimingModel(clock_resolution=resolution),
                )
                _, _, fix = run_scenario(config)
                errors.append(distance(fix.position, mobile))
            means.append(float(np.mean(errors)))
        assert means == sorted(means)


class TestScenarioConfigValidation:
    def test_too_few_towers(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(towers=RIGHT_TRIANGLE[:2], mobile_true_position=Point3(0, 0, 0))

    def test_duplicate_ids(self):
        towers = (RIGHT_TRIANGLE[0], RIGHT_TRIANGLE[1], TowerSite(0, Point3(5, 5, 0)))
        with pytest.raises(ConfigError):
            ScenarioConfig(towers=towers, mobile_true_position=Point3(0, 0, 0))

    def test_bad_knobs(self):
        with pytest.raises(ConfigError):
            basic_config(trials=0)
        with pytest.raises(ConfigError):
            basic_config(packet_loss=1.5)
        with pytest.raises(ConfigError):
            basic_config(tower_processing_delay=-1e-9)


class TestRenderers:
    def test_trace_format_shape(self):
        trace, _, _ = run_scenario(basic_config())
        lines = format_trace(trace).splitlines()
        assert len(lines) == 6
        for line in lines:
            time_s, kind, tower_id, detail = line.split("\t")
            assert len(time_s.split(".")[1]) == 9
            assert kind in ("request_arrives", "ack_arrives")
            assert tower_id in ("0", "1", "2")

    def test_measurement_csv_columns(self):
        trace, measurements, _ = run_scenario(basic_config())
        csv_text = measurement_csv(measurements, Point3(3, 4, 0))
        lines = csv_text.splitlines()
        assert lines[0] == "tower_id,turnaround_s,distance_m,actual_m,pct_error"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "0"
        assert float(first[2]) == pytest.approx(5.0, abs=1e-3)
        assert float(first[3]) == pytest.approx(5.0, abs=1e-3)
        assert float(first[4]) == pytest.approx(0.0, abs=0.01)

    def test_measurement_csv_zero_actual_leaves_pct_blank(self):
        config = basic_config(mobile_true_position=Point3(0, 0, 0))
        trace, measurements, _ = run_scenario(config)
        csv_text = measurement_csv(measurements, Point3(0, 0, 0))
        first_row = csv_text.splitlines()[1]
        assert first_row.endswith(",")
