import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wristmotion import DataError, NotCalibratedError, SynthesisParams, synthesize
from wristmotion.adaptive import (
    DifficultyState,
    PlayerModel,
    ShakeEvent,
    calibrate,
    calibration_shakes,
    decide,
    detect_shakes,
    load_snapshot,
    read_events,
    record_shake,
    rom_regression_fit,
    rom_regression_loocv_rmse,
    rom_regression_rmse,
    save_snapshot,
    simulate_session,
    speed_level,
    write_session_log,
)
from wristmotion.features import crossing_rate, rom_indicator


def _events(roms, speed=3.0):
    return [ShakeEvent(r, speed) for r in roms]


def test_calibration_median():
    state = calibrate(_events([2.0, 2.2, 1.8, 2.1, 1.9]))
    assert state.rom_threshold == pytest.approx(1.8)
    assert state.speed_threshold == pytest.approx(2.7)
    assert state.calibrated and state.rom_history == ()


def test_calibration_with_identical_values_is_then_exceeded():
    state = calibrate(_events([2.5] * 5))
    assert state.rom_threshold == pytest.approx(2.25)
    state, _ = record_shake(state, ShakeEvent(2.5, 3.0))
    assert state.rom_history == (True,)


def test_calibration_needs_five():
    with pytest.raises(NotCalibratedError):
        calibrate(_events([1.0] * 4))
    with pytest.raises(DataError):
        calibrate(_events([1.0] * 6))
    with pytest.raises(DataError):
        calibrate([ShakeEvent(1.0, 1.0, dorsiflexion=False)] * 5)


def _epoch(state, successes):
    t = state.rom_threshold
    record = None
    for i in range(10):
        value = t * 1.5 if i < successes else t * 0.5
        state, record = record_shake(state, ShakeEvent(value, 3.0))
    return state, record


@pytest.mark.parametrize("successes,decision,factor", [
    (10, "raise", 1.1), (9, "raise", 1.1), (7, "hold", 1.0), (6, "hold", 1.0), (5, "lower", 0.9), (0, "lower", 0.9),
])
def test_epoch_rules(successes, decision, factor):
    state = DifficultyState(2.0, 3.0, calibrated=True)
    new, record = _epoch(state, successes)
    assert record.rom_decision == decision
    assert new.rom_threshold == pytest.approx(2.0 * factor)
    assert new.rom_history == () and len(new.epochs) == 1


def test_decide_boundaries():
    assert decide(0.9) == "raise"
    assert decide(0.6) == "hold"
    assert decide(0.59) == "lower"


def test_epoch_closes_only_after_ten():
    state = DifficultyState(2.0, 3.0, calibrated=True)
    for _ in range(9):
        state, record = record_shake(state, ShakeEvent(5.0, 5.0))
        assert record is None
    assert len(state.rom_history) == 9
    _, record = record_shake(state, ShakeEvent(5.0, 5.0))
    assert record is not None


def test_speed_tracked_independently():
    state = DifficultyState(2.0, 3.0, calibrated=True)
    for _ in range(10):
        state, record = record_shake(state, ShakeEvent(5.0, 1.0))
    assert (record.rom_decision, record.speed_decision) == ("raise", "lower")


def test_uncalibrated_state_rejected():
    with pytest.raises(NotCalibratedError):
        record_shake(DifficultyState(2.0, 3.0), ShakeEvent(1.0, 1.0))


def test_clamping_at_bounds():
    state = DifficultyState(9.5, 9.5, calibrated=True)
    state, _ = _epoch(state, 10)
    assert state.rom_threshold == 10.0
    state = DifficultyState(0.105, 0.52, calibrated=True)
    for _ in range(10):
        state, _ = record_shake(state, ShakeEvent(0.0, 0.0))
    assert (state.rom_threshold, state.speed_threshold) == (0.1, 0.5)


def test_state_validation():
    with pytest.raises(DataError):
        DifficultyState(20.0, 3.0)
    with pytest.raises(DataError):
        DifficultyState(2.0, 3.0, step_fraction=1.5)
    with pytest.raises(DataError):
        ShakeEvent(-1.0, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 20), st.floats(0, 20)), min_size=1, max_size=60),
       st.floats(0.1, 10), st.floats(0.5, 10))
def test_thresholds_stay_within_bounds(values, rom0, speed0):
    state = DifficultyState(rom0, speed0, calibrated=True)
    for rom, speed in values:
        state, _ = record_shake(state, ShakeEvent(rom, speed))
        assert 0.1 <= state.rom_threshold <= 10.0
        assert 0.5 <= state.speed_threshold <= 10.0
        assert len(state.rom_history) < 10


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=10, max_size=40), st.floats(0, 3))
def test_better_player_never_gets_lower_threshold(values, boost):
    a = b = DifficultyState(2.0, 3.0, calibrated=True)
    for v in values:
        a, _ = record_shake(a, ShakeEvent(v, 3.0))
        b, _ = record_shake(b, ShakeEvent(v + boost, 3.0))
        assert b.rom_threshold >= a.rom_threshold


@pytest.mark.parametrize("rate,level", [(0.0, "slow"), (1.99, "slow"), (2.0, "medium"), (4.99, "medium"),
                                        (5.0, "fast"), (12.0, "fast")])
def test_speed_levels(rate, level):
    assert speed_level(rate) == level


def test_speed_level_rejects_negative():
    with pytest.raises(DataError):
        speed_level(-0.1)


def test_crossing_rate_grows_with_tempo():
    rates = [crossing_rate(synthesize(SynthesisParams("dorsiflexion", amplitude=2.0, frequency_hz=f, duration_s=2.0)))
             for f in (0.5, 1.5, 3.0)]
    assert rates[0] < rates[1] < rates[2]
    assert [speed_level(r) for r in rates] == ["slow", "medium", "fast"]


def test_regression_examples():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    fit = rom_regression_fit(x, 2 * x + 1)
    assert fit == pytest.approx((2.0, 1.0))
    assert rom_regression_rmse(fit, x, 2 * x + 1) == pytest.approx(0.0, abs=1e-12)
    assert rom_regression_fit(x, np.full(4, 1.5)) == pytest.approx((0.0, 1.5))
    with pytest.raises(DataError):
        rom_regression_fit([1.0, 1.0], [0.0, 1.0])


def test_regression_loocv_matches_manual_loop():
    rng = np.random.default_rng(0)
    x = rng.random(12)
    y = 3 * x + rng.normal(0, 0.1, 12)
    errs = []
    for i in range(12):
        keep = np.arange(12) != i
        slope, icpt = np.polyfit(x[keep], y[keep], 1)
        errs.append(slope * x[i] + icpt - y[i])
    assert rom_regression_loocv_rmse(x, y) == pytest.approx(np.sqrt(np.mean(np.square(errs))), rel=1e-9)


def test_simulation_climbs_towards_capability():
    player = PlayerModel(4.0, 4.0)
    state = DifficultyState(1.0, 1.0, calibrated=True)
    session = simulate_session(player, state, 300)
    records = session.epoch_records
    assert len(records) == 30
    climbing = [r.rom_threshold for r in records[:14]]
    assert all(b > a for a, b in zip(climbing, climbing[1:]))
    assert all(t >= 4.0 * 0.9 - 1e-9 for t in [r.rom_threshold for r in records[15:]])
    assert all(t <= 4.0 * 1.1 + 1e-9 for t in [r.rom_threshold for r in records])


def test_simulation_below_floor_settles_at_floor():
    session = simulate_session(PlayerModel(0.05, 0.2), DifficultyState(2.0, 3.0, calibrated=True), 400)
    assert session.final_state.rom_threshold == 0.1
    assert session.final_state.speed_threshold == 0.5


def test_non_compliant_player_changes_nothing():
    state = DifficultyState(2.0, 3.0, calibrated=True)
    session = simulate_session(PlayerModel(5.0, 5.0, compliance=0.0), state, 50)
    assert session.events == [] and session.final_state == state
    assert calibration_shakes(PlayerModel(5.0, 5.0, compliance=0.0)) == []


def test_simulation_is_deterministic():
    player = PlayerModel(3.0, 4.0, noise_std=0.5, compliance=0.8, seed=4)
    state = calibrate(calibration_shakes(player))
    a = simulate_session(player, state, 100)
    b = simulate_session(player, state, 100)
    assert a == b


def test_snapshot_round_trip(tmp_path):
    state = DifficultyState(2.0, 3.0, calibrated=True)
    state, _ = _epoch(state, 9)
    state, _ = record_shake(state, ShakeEvent(5.0, 1.0))
    save_snapshot(state, tmp_path / "s.toml")
    assert load_snapshot(tmp_path / "s.toml") == state


def test_snapshot_version_checked(tmp_path):
    p = tmp_path / "s.toml"
    save_snapshot(DifficultyState(2.0, 3.0, calibrated=True), p)
    p.write_text(p.read_text().replace("format_version = 1", "format_version = 7"))
    with pytest.raises(DataError):
        load_snapshot(p)


def test_session_log_feeds_calibration(tmp_path):
    player = PlayerModel(3.0, 4.0)
    session = simulate_session(player, calibrate(calibration_shakes(player)), 20)
    write_session_log(tmp_path / "log.csv", session)
    events = read_events(tmp_path / "log.csv")
    assert len(events) == 20
    assert calibrate(events[:5]).rom_threshold == pytest.approx(2.7)


def test_detect_shakes_once_per_second():
    rec = synthesize(SynthesisParams("dorsiflexion", amplitude=2.0, frequency_hz=2.0, duration_s=6.0))
    events = detect_shakes(rec, lambda ws: [True] * len(ws))
    assert [e.t for e in events] == pytest.approx([1.98, 2.98, 3.98, 4.98, 5.98])
    assert events[0].rom_value == pytest.approx(rom_indicator(rec.slice(0, 100)))
    assert detect_shakes(rec, lambda ws: [False] * len(ws)) == []
