import math

import numpy as np
import pytest

from slowfast.manifold import (
    ManifoldApproximation,
    QuadratureParams,
    compute_h0,
    compute_h1,
    manifold_noise,
    rescaled_ou_path,
    reduced_rhs,
    solve_Y0,
)
from slowfast.noise import frozen_integrals_from_ou_path, sample_frozen_integrals
from slowfast.particle import (
    ParticleParams,
    analytic_h0,
    analytic_h1,
    particle_spec,
    reduced_drift,
)
from slowfast.systems import SlowFastSpec, ValidationError

CHEAP = QuadratureParams(t_trunc=20.0, dtau=0.01, tol=1e-6)


def linear_spec(c=0.4, epsilon=0.05, sigma=0.0):
    """1-D system with closed-form manifold terms h0 = c x, h1 = -c(1+c) x."""
    return SlowFastSpec(
        A=np.zeros((1, 1)),
        B=-np.eye(1),
        f=lambda x, y: np.asarray(y, dtype=float),
        g=lambda x, y: c * np.asarray(x, dtype=float),
        f_jac=lambda x, y: (
            np.zeros(np.shape(x)[:-1] + (1, 1)),
            np.ones(np.shape(x)[:-1] + (1, 1)),
        ),
        g_jac=lambda x, y: (
            np.full(np.shape(x)[:-1] + (1, 1), c),
            np.zeros(np.shape(x)[:-1] + (1, 1)),
        ),
        epsilon=epsilon,
        sigma=sigma,
        n=1,
        m=1,
    )


class TestQuadratureParams:
    def test_validation(self):
        with pytest.raises(ValidationError):
            QuadratureParams(t_trunc=-1.0)
        with pytest.raises(ValidationError):
            QuadratureParams(dtau=0.0)
        with pytest.raises(ValidationError):
            QuadratureParams(t_trunc=1.0, dtau=0.3)

    def test_grid(self):
        q = QuadratureParams(t_trunc=2.0, dtau=0.5, tol=0.5)
        assert q.n_steps == 4
        assert np.allclose(q.grid(), [-2.0, -1.5, -1.0, -0.5, 0.0])

    def test_truncation_check(self):
        QuadratureParams().check_truncation(1.0)
        with pytest.raises(ValidationError):
            QuadratureParams(t_trunc=5.0, dtau=0.01, tol=1e-8).check_truncation(1.0)


class TestLinearOracle:
    """For x' = y, y' = (-y + c x)/eps (no noise) the invariant graph is
    y = m x with eps m^2 + m - c = 0, i.e. m = c - eps c^2 + O(eps^2),
    so h0(x) = c x and h1(x) = -c^2 x exactly."""

    def test_h0_and_h1(self):
        c = 0.4
        spec = linear_spec(c)
        eta = np.zeros((CHEAP.n_steps + 1, 1))
        xs = np.array([[1.0], [-2.5], [0.3]])
        h0 = compute_h0(spec, xs, eta, CHEAP)
        h1 = compute_h1(spec, xs, eta, CHEAP)
        assert np.allclose(h0, c * xs, atol=1e-6)
        assert np.allclose(h1, -c * c * xs, atol=1e-5)

    def test_h0_linear_in_x(self):
        spec = linear_spec(0.7)
        eta = np.zeros((CHEAP.n_steps + 1, 1))
        xs = np.array([[1.0], [3.0]])
        h0 = compute_h0(spec, xs, eta, CHEAP)
        assert h0[1, 0] == pytest.approx(3.0 * h0[0, 0], rel=1e-9)

    def test_fast_profile_relaxes(self):
        spec = linear_spec(0.4)
        eta = np.zeros((CHEAP.n_steps + 1, 1))
        Y0 = solve_Y0(spec, np.array([[2.0]]), eta, CHEAP)
        # by time 0 the profile has relaxed onto c*x
        assert Y0[-1, 0, 0] == pytest.approx(0.8, abs=1e-6)
        assert Y0[0, 0, 0] == 0.0

    def test_eta_shape_checked(self):
        spec = linear_spec()
        with pytest.raises(ValidationError):
            solve_Y0(spec, np.array([[1.0]]), np.zeros((5, 1)), CHEAP)


class TestParticleQuadrature:
    def test_matches_closed_forms_with_noise(self):
        p = ParticleParams(a=0.7, V=0.1, epsilon=0.05, sigma=0.01)
        spec = particle_spec(p)
        quad = QuadratureParams()
        noise = manifold_noise(spec, quad, master_seed=11, stream_id=(0, 0))
        approx = ManifoldApproximation.build(spec, quad, noise=noise)
        # the closed forms must be fed the integrals of the same noise
        # path the quadrature integrates against
        frozen = frozen_integrals_from_ou_path(quad.grid(), approx.eta)
        xi = np.array([[0.7, 2.2], [2.8, 0.5], [1.5, 1.5]])
        assert np.allclose(approx.h0(xi), analytic_h0(xi, p), atol=1e-6)
        assert np.allclose(approx.h1(xi), analytic_h1(xi, p, frozen), atol=1e-6)
        assert np.allclose(
            approx.h_eps(xi),
            analytic_h0(xi, p) + p.epsilon * analytic_h1(xi, p, frozen),
            atol=1e-6,
        )
        assert np.allclose(approx.eta_at_zero(), frozen.i_e, atol=1e-12)

    def test_single_point_shape(self):
        p = ParticleParams(sigma=0.0)
        approx = ManifoldApproximation.analytic_particle(p, frozen=None)
        out = approx.h0(np.array([1.0, 1.0]))
        assert out.shape == (2,)

    def test_reduced_rhs_matches_reduced_drift(self):
        p = ParticleParams(a=0.7, V=0.1, epsilon=0.05, sigma=0.01)
        noise = manifold_noise(particle_spec(p), QuadratureParams(), 3)
        frozen = sample_frozen_integrals(noise)
        approx = ManifoldApproximation.analytic_particle(p, frozen)
        xi = np.array([0.9, 2.4])
        assert np.allclose(
            reduced_rhs(xi, 0.0, approx),
            reduced_drift(xi, p, frozen, mode="frozen"),
            atol=1e-12,
        )


class TestBuild:
    def test_requires_noise_or_eta(self):
        with pytest.raises(ValidationError):
            ManifoldApproximation.build(linear_spec(), CHEAP)

    def test_rescaled_grid_mismatch_rejected(self):
        spec = linear_spec()
        noise = manifold_noise(spec, CHEAP, 0)
        with pytest.raises(ValidationError):
            rescaled_ou_path(spec, noise, QuadratureParams(t_trunc=20.0, dtau=0.02, tol=1e-6))
