import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slowfast.systems import (
    SlowFastSpec,
    ValidationError,
    check_assumptions,
    check_jacobian,
    contraction_rho,
    default_dichotomy_constants,
    estimate_lipschitz,
)


def linear_spec(n=1, m=1, epsilon=0.05, sigma=0.0):
    return SlowFastSpec(
        A=np.zeros((n, n)), B=-np.eye(m),
        f=lambda x, y: y, g=lambda x, y: 0.0 * x,
        epsilon=epsilon, sigma=sigma, n=n, m=m,
    )


class TestSpecValidation:
    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            SlowFastSpec(A=np.zeros((2, 2)), B=-np.eye(2), f=None, g=None,
                         epsilon=0.05, sigma=0.0, n=1, m=2)

    def test_epsilon_positive(self):
        with pytest.raises(ValidationError):
            linear_spec(epsilon=0.0)

    def test_sigma_nonnegative(self):
        with pytest.raises(ValidationError):
            linear_spec(sigma=-1.0)


class TestContraction:
    def test_gap_condition_boundary(self):
        # rho stays below 1 for small eps iff beta > K * L_g
        assert contraction_rho(1e-9, K=1, alpha=0, beta=1, L_f=1, L_g=0.5) < 1
        assert contraction_rho(1e-9, K=1, alpha=0, beta=1, L_f=1, L_g=1.5) >= 1

    @given(
        eps1=st.floats(min_value=1e-6, max_value=1.0),
        eps2=st.floats(min_value=1e-6, max_value=1.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_monotone_in_epsilon(self, eps1, eps2):
        lo, hi = sorted([eps1, eps2])
        r_lo = contraction_rho(lo, K=1, alpha=0.2, beta=1, L_f=1, L_g=0.5)
        r_hi = contraction_rho(hi, K=1, alpha=0.2, beta=1, L_f=1, L_g=0.5)
        assert r_lo <= r_hi + 1e-12

    def test_epsilon_star_brackets_unity(self):
        rep = check_assumptions(linear_spec(), K=1, alpha=0.0, beta=1.0, L_f=1.0, L_g=0.5)
        assert rep.h2_satisfied
        eps = rep.epsilon_star
        assert contraction_rho(eps * (1 - 1e-6), 1, 0.0, 1.0, 1.0, 0.5) < 1.0
        assert contraction_rho(eps * (1 + 1e-6), 1, 0.0, 1.0, 1.0, 0.5) >= 1.0

    def test_gap_violation_reported_not_raised(self):
        rep = check_assumptions(linear_spec(), K=1, alpha=0.0, beta=1.0, L_f=1.0, L_g=2.0)
        assert not rep.h2_satisfied
        assert rep.epsilon_star == 0.0

    def test_nonpositive_constants_raise(self):
        with pytest.raises(ValidationError):
            check_assumptions(linear_spec(), K=0.0, alpha=0.0, beta=1.0, L_f=1.0, L_g=0.5)
        with pytest.raises(ValidationError):
            check_assumptions(linear_spec(), K=1.0, alpha=0.0, beta=-1.0, L_f=1.0, L_g=0.5)

    def test_decay_weight(self):
        rep = check_assumptions(linear_spec(), K=1, alpha=0.0, beta=1.0, L_f=1.0, L_g=0.5)
        assert rep.lambda_star(0.05) == pytest.approx((1.0 - 0.5) / 0.1)


class TestDefaultConstants:
    def test_diagonal_matrices(self):
        spec = SlowFastSpec(
            A=np.diag([0.3, -1.0]), B=np.diag([-2.0, -3.0]),
            f=lambda x, y: y, g=lambda x, y: x,
            epsilon=0.05, sigma=0.0, n=2, m=2,
        )
        K, alpha, beta = default_dichotomy_constants(spec)
        assert K == pytest.approx(1.0)
        assert alpha == pytest.approx(0.3)
        assert beta == pytest.approx(2.0)

    def test_unstable_B_rejected(self):
        spec = SlowFastSpec(
            A=np.zeros((1, 1)), B=np.eye(1),
            f=lambda x, y: y, g=lambda x, y: x,
            epsilon=0.05, sigma=0.0, n=1, m=1,
        )
        with pytest.raises(ValidationError):
            default_dichotomy_constants(spec)


class TestLipschitz:
    def test_linear_map_exact(self):
        M = np.array([[2.0, 0.0], [0.0, -1.0]])
        est = estimate_lipschitz(lambda x: x @ M.T, [(-1, 1), (-1, 1)], samples=4000)
        assert est == pytest.approx(2.0, rel=0.02)

    def test_is_lower_bound(self):
        # |sin'| <= 1, so the sampled estimate can never exceed 1
        est = estimate_lipschitz(lambda x: np.sin(x), [(-3, 3)], samples=2000)
        assert est <= 1.0 + 1e-9
        assert est > 0.9

    def test_degenerate_box_rejected(self):
        with pytest.raises(ValidationError):
            estimate_lipschitz(lambda x: x, [(1.0, 1.0)])

    def test_seeded_reproducible(self):
        f = lambda x: np.sin(2 * x)
        a = estimate_lipschitz(f, [(-1, 1)], seed=7)
        b = estimate_lipschitz(f, [(-1, 1)], seed=7)
        assert a == b


class TestJacobianCheck:
    def setup_method(self):
        self.fn = lambda x, y: np.array([math.sin(x[0]) * y[0], x[0] + y[0] ** 2])
        self.jac = lambda x, y: (
            np.array([[math.cos(x[0]) * y[0]], [1.0]]),
            np.array([[math.sin(x[0])], [2 * y[0]]]),
        )

    def test_consistent_passes(self):
        worst = check_jacobian(self.fn, self.jac, [[0.3]], [[0.7]])
        assert worst < 1e-5

    def test_wrong_jacobian_fails(self):
        bad = lambda x, y: (np.array([[1.0], [1.0]]), np.array([[0.0], [0.0]]))
        with pytest.raises(ValidationError):
            check_jacobian(self.fn, bad, [[0.3]], [[0.7]])
