"""Tests for the bicycle model, actuation models and the reference plant."""

import math

import numpy as np
import pytest

from drive_planner.dynamics.actuation import (
    ActuationSpec,
    InstantActuation,
    LowPassActuation,
    PlantActuation,
    actuate,
    build_actuation,
)
from drive_planner.dynamics.analysis import rise_time, simulate_step_response
from drive_planner.dynamics.bicycle import step_bicycle, turning_radius
from drive_planner.dynamics.models import VehicleState, clamp_action
from drive_planner.dynamics.plant import (
    LOG_HEADER,
    PlantConfig,
    ReferencePlant,
    ResponseLog,
    generate_response_log,
    make_command_schedule,
)
from drive_planner.utils.errors import (
    DatasetError,
    ErrorCode,
    MissingPrerequisiteError,
    ValidationError,
)

WHEELBASE = 2.8


def _state(**kwargs):
    values = dict(x=0.0, y=0.0, heading=0.0, speed=0.0)
    values.update(kwargs)
    return VehicleState(**values)


class TestBicycle:
    def test_straight_displacement(self):
        new = step_bicycle(_state(speed=5.0, heading=0.3), 0.1, WHEELBASE)
        assert math.hypot(new.x, new.y) == pytest.approx(0.5)
        assert math.atan2(new.y, new.x) == pytest.approx(0.3)
        assert new.heading == 0.3
        assert new.speed == 5.0

    def test_speed_clamped_at_zero(self):
        new = step_bicycle(_state(speed=0.1, actual_acc=-2.0), 0.1, WHEELBASE)
        assert new.speed == 0.0

    def test_zero_steer_keeps_heading(self):
        state = _state(speed=3.0, heading=-1.234, actual_acc=0.7)
        for k in range(500):
            acc = 0.7 if k < 250 else -1.5
            state = step_bicycle(state.with_actuation(acc, 0.0), 0.1, WHEELBASE)
        assert state.heading == -1.234

    def test_turning_radius(self):
        steer = 0.2
        radius = turning_radius(steer, WHEELBASE)
        assert radius == pytest.approx(WHEELBASE / math.tan(steer))
        state = _state(speed=5.0, actual_steer=steer)
        center = np.array([0.0, radius])
        distances = []
        for _ in range(1000):
            state = step_bicycle(state, 0.001, WHEELBASE)
            distances.append(math.hypot(state.x - center[0], state.y - center[1]))
        assert np.max(np.abs(np.array(distances) - radius)) / radius < 1e-3

    def test_straight_turning_radius_is_infinite(self):
        assert turning_radius(0.0, WHEELBASE) == math.inf

    def test_clamps_realized_actuation(self):
        state = _state(speed=1.0, actual_acc=5.0, actual_steer=-0.9)
        new = step_bicycle(state, 0.1, WHEELBASE)
        assert new.actual_acc == 2.0
        assert new.actual_steer == -0.2

    def test_heading_wrapped(self):
        state = _state(speed=8.0, heading=math.pi - 1e-3, actual_steer=0.2)
        new = step_bicycle(state, 0.1, WHEELBASE)
        assert -math.pi < new.heading <= math.pi
        assert new.heading < 0.0

    def test_rejects_non_positive_dt(self):
        with pytest.raises(ValueError):
            step_bicycle(_state(), 0.0, WHEELBASE)

    def test_yaw_uses_speed_at_step_start(self):
        state = _state(speed=2.0, actual_acc=2.0, actual_steer=0.1)
        new = step_bicycle(state, 0.1, WHEELBASE)
        yaw_step = 2.0 / WHEELBASE * math.tan(0.1) * 0.1
        assert new.heading == pytest.approx(yaw_step, abs=1e-15)
        distance = 0.5 * (2.0 + 2.2) * 0.1
        assert new.x == pytest.approx(distance * math.cos(0.5 * yaw_step))
        assert new.y == pytest.approx(distance * math.sin(0.5 * yaw_step))

    @pytest.mark.parametrize("acc, tolerance", [(0.0, 1e-3), (0.5, 0.1)])
    def test_half_steps_agree(self, acc, tolerance):
        def drive(dt):
            state = _state(speed=2.0, actual_acc=acc, actual_steer=0.05)
            for _ in range(int(round(10.0 / dt))):
                state = step_bicycle(state, dt, WHEELBASE)
            return state

        # yaw is first order in dt while the speed changes
        coarse, fine = drive(0.1), drive(0.05)
        assert math.hypot(coarse.x - fine.x, coarse.y - fine.y) < tolerance


class TestActuation:
    def test_instant(self):
        assert actuate(InstantActuation(), _state(), 1.2, -0.1) == (1.2, -0.1)

    def test_commands_clamped(self):
        assert actuate(InstantActuation(), _state(), 5.0, -1.0) == (2.0, -0.2)
        assert clamp_action(-3.0, 0.1) == (-2.0, 0.1)

    def test_low_pass_step(self):
        acc, steer = actuate(LowPassActuation(0.3), _state(), 0.0, 0.2)
        assert acc == 0.0
        assert steer == pytest.approx(0.06)

    def test_low_pass_converges_geometrically(self):
        model = LowPassActuation(0.3)
        state = _state()
        errors = []
        for _ in range(10):
            acc, steer = actuate(model, state, 1.0, 0.2)
            state = state.with_actuation(acc, steer)
            errors.append(1.0 - acc)
        ratios = np.array(errors[1:]) / np.array(errors[:-1])
        np.testing.assert_allclose(ratios, 0.7, rtol=1e-9)

    @pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
    def test_low_pass_alpha_range(self, alpha):
        with pytest.raises(ValidationError):
            LowPassActuation(alpha)

    def test_deep_response_needs_checkpoint(self):
        with pytest.raises(ValueError):
            ActuationSpec(kind="deep_response")

    def test_missing_response_checkpoint(self, tmp_path):
        spec = ActuationSpec(
            kind="deep_response", response_checkpoint=str(tmp_path / "absent.dppf")
        )
        with pytest.raises(MissingPrerequisiteError) as excinfo:
            build_actuation(spec)
        assert excinfo.value.error_code == ErrorCode.NOT_FOUND

    def test_build_variants(self):
        instant = build_actuation(ActuationSpec(kind="instant"))
        assert isinstance(instant, InstantActuation)
        low_pass = build_actuation(ActuationSpec(kind="low_pass", alpha=0.5))
        assert isinstance(low_pass, LowPassActuation) and low_pass.alpha == 0.5
        assert isinstance(build_actuation(ActuationSpec(kind="plant")), PlantActuation)


class TestReferencePlant:
    def test_zero_commands(self):
        log = generate_response_log(
            PlantConfig(), np.zeros((50, 2)), np.random.default_rng(0)
        )
        assert np.all(log.meas_acc == 0.0)
        assert np.all(log.meas_steer == 0.0)

    def test_delayed_first_order_lag(self):
        schedule = np.zeros((60, 2))
        schedule[10:, 1] = 0.2
        config = PlantConfig(tau_steer=0.4, delay_ticks=2, rate_limit_steer=None)
        log = generate_response_log(config, schedule, np.random.default_rng(0))
        t = log.t
        expected = np.where(t <= 1.2, 0.0, 0.2 * (1.0 - np.exp(-(t - 1.2) / 0.4)))
        np.testing.assert_allclose(log.meas_steer, expected, rtol=1e-9, atol=1e-12)
        assert log.meas_steer[12] == 0.0

    def test_rate_limit(self):
        schedule = np.zeros((20, 2))
        schedule[:, 0] = 2.0
        log = generate_response_log(PlantConfig(), schedule, np.random.default_rng(0))
        steps = np.diff(log.meas_acc)
        assert np.all(log.meas_acc[:3] == 0.0)
        assert steps[2] == pytest.approx(0.5)
        assert np.all(steps <= 0.5 + 1e-12)
        assert steps[3] == pytest.approx((1.0 - math.exp(-1.0 / 3.0)) * 1.5)

    def test_saturation(self):
        config = PlantConfig(tau_acc=1e-6, delay_ticks=0, rate_limit_acc=None)
        plant = ReferencePlant(config)
        for _ in range(5):
            acc, _ = plant.advance(10.0, 0.0)
        assert acc == 2.0

    def test_empty_schedule(self):
        with pytest.raises(ValidationError):
            generate_response_log(
                PlantConfig(), np.zeros((0, 2)), np.random.default_rng(0)
            )

    def test_noise_is_seeded(self):
        config = PlantConfig(noise_std_acc=0.05, noise_std_steer=0.005)
        schedule = make_command_schedule(200, np.random.default_rng(1))
        a = generate_response_log(config, schedule, np.random.default_rng(2))
        b = generate_response_log(config, schedule, np.random.default_rng(2))
        np.testing.assert_array_equal(a.as_matrix(), b.as_matrix())
        assert np.all(np.abs(a.meas_acc) <= 2.0)
        assert np.all(np.abs(a.meas_steer) <= 0.2)

    def test_schedule_ranges(self):
        schedule = make_command_schedule(1000, np.random.default_rng(4), 0.9)
        assert schedule.shape == (1000, 2)
        assert np.all(np.abs(schedule[:, 0]) <= 1.8 + 1e-12)
        assert np.all(np.abs(schedule[:, 1]) <= 0.18 + 1e-12)
        np.testing.assert_array_equal(
            schedule, make_command_schedule(1000, np.random.default_rng(4), 0.9)
        )


class TestResponseLog:
    def test_csv_round_trip(self, tmp_path):
        schedule = make_command_schedule(120, np.random.default_rng(0))
        log = generate_response_log(PlantConfig(), schedule, np.random.default_rng(0))
        path = log.to_csv(tmp_path / "log.csv")
        assert path.read_text(encoding="utf-8").splitlines()[0] == LOG_HEADER
        loaded = ResponseLog.from_csv(path)
        np.testing.assert_array_equal(loaded.as_matrix(), log.as_matrix())

    def test_bad_header(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("a,b,c,d,e,f\n0,0,0,0,0,0\n", encoding="utf-8")
        with pytest.raises(DatasetError):
            ResponseLog.from_csv(path)

    def test_uneven_timestamps(self):
        t = np.array([0.0, 0.1, 0.3])
        zeros = np.zeros(3)
        with pytest.raises(DatasetError):
            ResponseLog(t, zeros, zeros, zeros, zeros, zeros)

    def test_measured_out_of_range(self):
        t = np.array([0.0, 0.1])
        zeros = np.zeros(2)
        with pytest.raises(DatasetError):
            ResponseLog(t, zeros, zeros, zeros, zeros, np.array([0.0, 0.3]))


class TestStepResponse:
    def test_rise_time_of_exponential(self):
        t = np.linspace(0.0, 5.0, 5001)
        y = 1.0 - np.exp(-t / 0.4)
        expected = 0.4 * math.log(9.0)
        assert rise_time(t, y, final=1.0) == pytest.approx(expected, abs=1e-3)

    def test_plant_rise_time(self):
        config = PlantConfig(tau_steer=0.4, delay_ticks=0, rate_limit_steer=None)
        commands = np.zeros((80, 2))
        commands[10:, 1] = 0.2
        out = simulate_step_response(PlantActuation(config), commands)
        t = np.arange(80) * 0.1
        measured = rise_time(t, out[:, 1], final=0.2)
        assert measured == pytest.approx(2.197 * 0.4, rel=0.1)

    def test_first_row_is_rest_state(self):
        commands = np.full((5, 2), (1.0, 0.1))
        out = simulate_step_response(InstantActuation(), commands)
        assert tuple(out[0]) == (0.0, 0.0)
        assert tuple(out[1]) == (1.0, 0.1)
