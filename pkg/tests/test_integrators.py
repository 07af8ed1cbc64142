import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slowfast.integrators import (
    ExitEvent,
    IntegrationError,
    IntegratorConfig,
    Trajectory,
    compare_full_reduced,
    detect_exit,
    first_exit,
    integrate_full,
    integrate_reduced,
)
from slowfast.noise import NoiseRealization
from slowfast.particle import ParticleParams, stream_function
from slowfast.systems import ValidationError

PI = math.pi


def mk_noise(seed=0, dt=1e-3, t_max=100.0, stream=(0, 0)):
    return NoiseRealization(
        master_seed=seed, dt=dt, t_min=-1.0, t_max=t_max, stream_id=stream, components=2
    )


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValidationError):
            IntegratorConfig(dt=0.0)
        with pytest.raises(ValidationError):
            IntegratorConfig(scheme="leapfrog")
        with pytest.raises(ValidationError):
            IntegratorConfig(record_every=0)

    def test_n_steps(self):
        assert IntegratorConfig(dt=0.1, t_max=1.0).n_steps == 10


class TestExitDetection:
    def test_interpolated_crossing(self):
        ev = detect_exit((0.1, 3.0), (0.1, 3.2), t_prev=5.0, dt=0.01)
        assert ev.side == "bottom"
        frac = (PI - 3.0) / 0.2
        assert ev.time == pytest.approx(5.0 + frac * 0.01)
        assert ev.point[1] == pytest.approx(PI)

    def test_no_exit(self):
        assert detect_exit((1.0, 1.0), (1.1, 1.2), 0.0, 0.01) is None

    def test_tie_prefers_left(self):
        # crossing xi1 = 0 and xi2 = 0 at the same interpolated fraction
        ev = detect_exit((0.1, 0.1), (-0.1, -0.1), 0.0, 0.01)
        assert ev.side == "left"

    def test_earlier_crossing_wins(self):
        ev = detect_exit((0.05, 0.2), (-0.15, -0.2), 0.0, 0.01)
        # xi1 hits 0 at fraction 0.25, xi2 at 0.5
        assert ev.side == "left"
        assert ev.time == pytest.approx(0.0025)

    def test_boundary_start_is_immediate_exit(self):
        times = np.array([0.0, 1.0])
        states = np.array([[0.0, 1.0, 0, 0], [0.1, 1.0, 0, 0]])
        ev = first_exit(times, states)
        assert ev.side == "left" and ev.time == 0.0

    def test_interior_path_no_exit(self):
        times = np.linspace(0, 1, 11)
        states = np.tile([1.5, 1.5], (11, 1))
        assert first_exit(times, states) is None


class TestTrajectory:
    def test_monotone_times_required(self):
        with pytest.raises(ValidationError):
            Trajectory(times=np.array([0.0, 0.0]), states=np.zeros((2, 2)))

    def test_csv_round_trip(self, tmp_path):
        tr = Trajectory(
            times=np.array([0.0, 0.5]),
            states=np.array([[1.0, 2.0], [3.0, 4.0]]),
            exit_event=ExitEvent(time=0.7, side="bottom", point=(1.0, PI)),
        )
        f = tmp_path / "traj.csv"
        tr.to_csv(f, labels=["xi1", "xi2"])
        lines = f.read_text().strip().splitlines()
        assert lines[0] == "t,xi1,xi2,exit_time,exit_side"
        assert lines[1].split(",") == ["0", "1", "2", "0.7", "bottom"]


class TestDeterministicFull:
    def test_settling_path(self):
        # strong settling carries the particle out through the bottom
        p = ParticleParams(a=0.7, V=0.3, epsilon=0.05, sigma=0.0)
        cfg = IntegratorConfig(dt=1e-3, t_max=200.0, scheme="rk4-deterministic")
        tr = integrate_full([1.2, 0.8, 0.0, 0.0], p, None, cfg)
        assert tr.exit_event is not None and tr.exit_event.side == "bottom"

    def test_rk4_requires_zero_sigma(self):
        p = ParticleParams(sigma=0.1)
        cfg = IntegratorConfig(scheme="rk4-deterministic")
        with pytest.raises(ValidationError):
            integrate_full([1.0, 1.0, 0.0, 0.0], p, mk_noise(), cfg)

    def test_exponential_and_rk4_agree_when_deterministic(self):
        p = ParticleParams(a=0.7, V=0.1, epsilon=0.05, sigma=0.0)
        init = [1.0, 2.0, 0.1, 0.0]
        a = integrate_full(init, p, None, IntegratorConfig(dt=2e-4, t_max=5.0))
        b = integrate_full(
            init, p, None, IntegratorConfig(dt=2e-4, t_max=5.0, scheme="rk4-deterministic")
        )
        # the exponential scheme's position coupling is first order in dt
        assert np.allclose(a.states[-1], b.states[-1], atol=5e-4)

    def test_bad_init_shape(self):
        with pytest.raises(ValidationError):
            integrate_full([1.0, 1.0], ParticleParams(), mk_noise(), IntegratorConfig())


class TestStochasticFull:
    def test_reproducible(self):
        p = ParticleParams(sigma=0.1)
        cfg = IntegratorConfig(dt=1e-3, t_max=2.0)
        a = integrate_full([1.5, 1.5, 0, 0], p, mk_noise(seed=4), cfg)
        b = integrate_full([1.5, 1.5, 0, 0], p, mk_noise(seed=4), cfg)
        assert np.array_equal(a.states, b.states)

    def test_schemes_agree_statistically(self):
        # independent discretizations of the same law: compare moments
        p = ParticleParams(a=0.7, V=0.1, epsilon=0.05, sigma=0.1)
        cfg_rde = IntegratorConfig(dt=1e-3, t_max=1.0)
        cfg_em = IntegratorConfig(dt=1e-4, t_max=1.0, scheme="euler-maruyama")
        finals_rde, finals_em = [], []
        for i in range(40):
            n1 = mk_noise(seed=100, dt=1e-4, t_max=2.0, stream=(0, i))
            n2 = mk_noise(seed=200, dt=1e-4, t_max=2.0, stream=(0, i))
            finals_rde.append(integrate_full([1.5, 1.5, 0, 0], p, n1, cfg_rde).states[-1])
            finals_em.append(integrate_full([1.5, 1.5, 0, 0], p, n2, cfg_em).states[-1])
        m1 = np.mean(finals_rde, axis=0)
        m2 = np.mean(finals_em, axis=0)
        s = np.std(finals_rde, axis=0) / math.sqrt(40)
        assert np.all(np.abs(m1 - m2) < 5 * s + 1e-3)

    def test_em_guards(self):
        p = ParticleParams(sigma=0.1, epsilon=0.05)
        with pytest.raises(ValidationError):
            integrate_full(
                [1, 1, 0, 0], p, mk_noise(dt=0.03),
                IntegratorConfig(dt=0.03, scheme="euler-maruyama"),
            )
        with pytest.raises(ValidationError):
            integrate_full(
                [1, 1, 0, 0], p, mk_noise(dt=1e-3),
                IntegratorConfig(dt=1e-2, scheme="euler-maruyama"),
            )

    def test_sigma_without_noise_rejected(self):
        with pytest.raises(ValidationError):
            integrate_full([1, 1, 0, 0], ParticleParams(sigma=0.1), None, IntegratorConfig())


class TestReduced:
    def test_closed_orbit_in_trapped_region(self):
        # eps = sigma = 0 conserves the stream function exactly
        p = ParticleParams(a=0.7, V=0.1, epsilon=1e-12, sigma=0.0)
        cfg = IntegratorConfig(dt=1e-3, t_max=30.0)
        tr = integrate_reduced([2.0, 1.8], p, None, cfg)
        psi = stream_function(tr.states, p)
        assert np.max(np.abs(psi - psi[0])) < 1e-6

    def test_modes_reproducible_and_distinct(self):
        p = ParticleParams(sigma=0.1)
        cfg = IntegratorConfig(dt=1e-3, t_max=2.0)
        a1 = integrate_reduced([1.5, 1.5], p, mk_noise(seed=1), cfg, mode="frozen")
        a2 = integrate_reduced([1.5, 1.5], p, mk_noise(seed=1), cfg, mode="frozen")
        b = integrate_reduced([1.5, 1.5], p, mk_noise(seed=1), cfg, mode="evolving")
        assert np.array_equal(a1.states, a2.states)
        assert not np.allclose(a1.states, b.states)

    def test_sigma_zero_modes_coincide(self):
        p = ParticleParams(sigma=0.0)
        cfg = IntegratorConfig(dt=1e-3, t_max=2.0)
        a = integrate_reduced([1.5, 1.5], p, None, cfg, mode="frozen")
        b = integrate_reduced([1.5, 1.5], p, None, cfg, mode="evolving")
        assert np.allclose(a.states, b.states, atol=1e-12)

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            integrate_reduced([1.5, 1.5], ParticleParams(), mk_noise(), IntegratorConfig(), "x")

    @given(seed=st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=10, deadline=None)
    def test_exit_time_consistent_under_dt_halving(self, seed):
        p = ParticleParams(a=0.7, V=0.3, epsilon=0.05, sigma=0.0)
        start = np.array([0.5 + (seed % 7) * 0.3, 0.5 + (seed % 5) * 0.4])
        coarse = integrate_reduced(start, p, None, IntegratorConfig(dt=2e-3, t_max=100.0))
        fine = integrate_reduced(start, p, None, IntegratorConfig(dt=1e-3, t_max=100.0))
        assert (coarse.exit_event is None) == (fine.exit_event is None)
        if coarse.exit_event is not None:
            assert abs(coarse.exit_event.time - fine.exit_event.time) < 2e-3


class TestReductionFidelity:
    def test_deviation_shrinks_with_epsilon(self):
        cfg = IntegratorConfig(dt=2e-4, t_max=3.0)
        noise = None
        devs = []
        for eps in (0.04, 0.01):
            p = ParticleParams(a=0.7, V=0.1, epsilon=eps, sigma=0.0)
            rep = compare_full_reduced([1.2, 1.7], p, noise, cfg, t_window=(1.0, 3.0))
            devs.append(rep.sup_graph_distance)
        # one dyadic refinement in eps: second-order graph error drops ~16x
        assert devs[1] < devs[0] / 8.0

    def test_stochastic_runs_share_noise(self):
        p = ParticleParams(a=0.7, V=0.1, epsilon=0.05, sigma=0.01)
        cfg = IntegratorConfig(dt=1e-3, t_max=2.0)
        rep = compare_full_reduced([1.2, 1.7], p, mk_noise(seed=8), cfg, t_window=(0.5, 2.0))
        # slow positions stay O(eps)-close pathwise on a short window
        assert rep.sup_slow_deviation < 0.05


class TestFailureReporting:
    def test_nonfinite_state_raises_with_context(self):
        times = np.array([0.0, 1.0, 2.0])
        states = np.array([[1.0, 1.0], [1.1, 1.0], [np.nan, 1.0]])
        from slowfast.integrators import _check_finite

        with pytest.raises(IntegrationError) as e:
            _check_finite(times, states)
        assert e.value.last_time == 1.0
        assert np.allclose(e.value.last_state, [1.1, 1.0])
