"""Quadrature approximation of random slow manifolds.

The graph of the manifold is expanded in the scale separation as
h_eps = h0 + eps * h1 with

    h0(xi) = \\int_{-inf}^0 e^{-B s} g(xi, Y0(s) + sigma eta(s)) ds
    h1(xi) = \\int_{-inf}^0 e^{-B s} { g_x(xi, .) [A s xi + \\int_0^s f(xi, Y0(r) + sigma eta(r)) dr]
                                      + g_y(xi, .) Y1(s) } ds

where Y0 solves Y0' = B Y0 + g(xi, Y0 + sigma eta) and Y1 the linear
variational equation, both on rescaled time, and eta is the unit
stationary OU path read through the Brownian rescale of the driving
noise.  Improper integrals are truncated at -T_trunc where the
exponential envelope e^{-beta T} is below tolerance; all integrals use
composite Simpson on the uniform ODE grid.  Y0 and Y1 start from 0 at
-T_trunc: exponential forgetting makes the initial value immaterial at
the stated tolerance.

Evaluations are batched over xi (leading axis) against one shared
noise realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .noise import NoiseRealization, _cumtrapz_from_zero, _simpson, simulate_ou
from .systems import SlowFastSpec, ValidationError


@dataclass(frozen=True)
class QuadratureParams:
    t_trunc: float = 23.0
    dtau: float = 1e-3
    tol: float = 1e-8

    def __post_init__(self):
        if self.t_trunc <= 0 or self.dtau <= 0 or self.tol <= 0:
            raise ValidationError("quadrature parameters must be positive")
        n = self.t_trunc / self.dtau
        if abs(n - round(n)) > 1e-9:
            raise ValidationError("t_trunc must be a multiple of dtau")

    @property
    def n_steps(self) -> int:
        return round(self.t_trunc / self.dtau)

    def grid(self) -> np.ndarray:
        return -self.t_trunc + self.dtau * np.arange(self.n_steps + 1)

    def check_truncation(self, beta: float):
        if math.exp(-beta * self.t_trunc) >= self.tol:
            raise ValidationError(
                f"truncation horizon too short: exp(-beta*T) = "
                f"{math.exp(-beta * self.t_trunc):.2e} >= tol {self.tol:.2e}"
            )


def manifold_noise(spec: SlowFastSpec, quad: QuadratureParams, master_seed, stream_id=(0, 0)):
    """A noise realization whose rescaled view lands on the quadrature grid."""
    dt = spec.epsilon * quad.dtau
    t_min = -spec.epsilon * quad.t_trunc - dt
    return NoiseRealization(
        master_seed=master_seed,
        dt=dt,
        t_min=t_min,
        t_max=max(dt, 1.0),
        stream_id=stream_id,
        components=spec.m,
    )


def rescaled_ou_path(spec: SlowFastSpec, noise: NoiseRealization, quad: QuadratureParams):
    """Unit OU path eta(theta_s psi_eps omega) at the quadrature nodes."""
    view = noise.rescaled(spec.epsilon)
    if abs(view.dt - quad.dtau) > 1e-12 * quad.dtau:
        raise ValidationError(
            f"noise grid (rescaled dt {view.dt}) does not match dtau {quad.dtau}"
        )
    _, eta = simulate_ou(spec.B, 1.0, 1.0, view, -quad.t_trunc, 0.0)
    return eta


def _beta_of(spec: SlowFastSpec) -> float:
    return -float(np.max(np.real(np.linalg.eigvals(spec.B))))


def _decay_weights(spec: SlowFastSpec, quad: QuadratureParams) -> np.ndarray:
    """e^{-B s_k} for the grid nodes s_k <= 0 (decaying products)."""
    n = quad.n_steps
    M = expm(spec.B * quad.dtau)
    E = np.empty((n + 1, spec.m, spec.m))
    E[n] = np.eye(spec.m)
    for k in range(n, 0, -1):
        E[k - 1] = E[k] @ M
    return E


def _eta_mid(eta):
    return 0.5 * (eta[:-1] + eta[1:])


def solve_Y0(spec: SlowFastSpec, xi, eta, quad: QuadratureParams):
    """Relaxed fast profile on [-T_trunc, 0]; shape (nodes, batch, m).

    Forward RK4 from Y0(-T) = 0; exponential forgetting bounds the
    influence of that choice by e^{-beta(T+s)} at node s.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    P = xi.shape[0]
    n = quad.n_steps
    if eta.shape[0] != n + 1:
        raise ValidationError("eta must be sampled at the quadrature nodes")
    sg = spec.sigma
    h = quad.dtau
    B = spec.B
    em = _eta_mid(eta)
    Y = np.zeros((n + 1, P, spec.m))
    y = Y[0]

    def rhs(y, eta_s):
        return y @ B.T + spec.g(xi, y + sg * eta_s)

    for k in range(n):
        e0, e1, e2 = eta[k], em[k], eta[k + 1]
        k1 = rhs(y, e0)
        k2 = rhs(y + 0.5 * h * k1, e1)
        k3 = rhs(y + 0.5 * h * k2, e1)
        k4 = rhs(y + h * k3, e2)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        Y[k + 1] = y
    return Y


def compute_h0(spec: SlowFastSpec, xi, eta, quad: QuadratureParams, Y0=None):
    """Zeroth-order manifold term by composite Simpson on the grid."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if Y0 is None:
        Y0 = solve_Y0(spec, xi, eta, quad)
    E = _decay_weights(spec, quad)
    arg = Y0 + spec.sigma * eta[:, None, :]
    xib = np.broadcast_to(xi, arg.shape[:-1] + (spec.n,))
    gvals = np.broadcast_to(spec.g(xib, arg), arg.shape[:-1] + (spec.m,))
    integrand = np.einsum("kij,kpj->kpi", E, gvals)
    return _simpson(integrand, quad.grid())


def _slow_inner_integral(spec: SlowFastSpec, xi, eta, quad, Y0):
    """F(s) = \\int_0^s f(xi, Y0(r) + sigma eta(r)) dr at the nodes."""
    arg = Y0 + spec.sigma * eta[:, None, :]
    xib = np.broadcast_to(xi, arg.shape[:-1] + (spec.n,))
    fvals = np.broadcast_to(spec.f(xib, arg), arg.shape[:-1] + (spec.n,))
    return _cumtrapz_from_zero(quad.grid(), fvals)


_Y1_BLOCK = 1024  # precompute jacobians this many steps at a time


def solve_Y1(spec: SlowFastSpec, xi, eta, quad: QuadratureParams, Y0):
    """First-order profile: linear inhomogeneous ODE driven by Y0.

    Forcing g_x(xi, .) [A s xi + F(s)]; coefficient B + g_y(xi, .).
    RK4 from Y1(-T) = 0 with midpoint data interpolated from the grid.
    The jacobian/forcing evaluations are batched over blocks of steps,
    which keeps the per-step cost to a few dense array operations
    without materializing node-count-sized jacobian stacks.
    """
    if spec.g_jac is None:
        raise ValidationError("solve_Y1 requires g_jac on the system spec")
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    P = xi.shape[0]
    n = quad.n_steps
    h = quad.dtau
    s_nodes = quad.grid()
    sg = spec.sigma
    F = _slow_inner_integral(spec, xi, eta, quad, Y0)
    em = _eta_mid(eta)
    Y0m = 0.5 * (Y0[:-1] + Y0[1:])
    Fm = 0.5 * (F[:-1] + F[1:])
    Axi = xi @ spec.A.T

    def coeff_and_force(s, y0_s, eta_s, F_s):
        """Vectorized over a leading block-of-steps axis."""
        arg = y0_s + sg * eta_s[:, None, :]
        xib = np.broadcast_to(xi, arg.shape[:-1] + (spec.n,))
        gx, gy = spec.g_jac(xib, arg)
        drive = s[:, None, None] * Axi[None, :, :] + F_s
        force = np.einsum("...ij,...j->...i", np.broadcast_to(gx, arg.shape + (spec.n,)), drive)
        return np.broadcast_to(gy, arg.shape + (spec.m,)), force

    Y1 = np.zeros((n + 1, P, spec.m))
    y = Y1[0]
    B = spec.B

    def rhs(y, gy, force):
        return y @ B.T + np.einsum("...ij,...j->...i", gy, y) + force

    for start in range(0, n, _Y1_BLOCK):
        stop = min(start + _Y1_BLOCK, n)
        sl = slice(start, stop + 1)
        slm = slice(start, stop)
        gyN, fN = coeff_and_force(s_nodes[sl], Y0[sl], eta[sl], F[sl])
        gyM, fM = coeff_and_force(s_nodes[slm] + 0.5 * h, Y0m[slm], em[slm], Fm[slm])
        for j in range(stop - start):
            k1 = rhs(y, gyN[j], fN[j])
            k2 = rhs(y + 0.5 * h * k1, gyM[j], fM[j])
            k3 = rhs(y + 0.5 * h * k2, gyM[j], fM[j])
            k4 = rhs(y + h * k3, gyN[j + 1], fN[j + 1])
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            Y1[start + j + 1] = y
    return Y1


def compute_h1(spec: SlowFastSpec, xi, eta, quad: QuadratureParams, Y0=None, Y1=None):
    """First-order manifold term (Simpson over the stored profiles)."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if Y0 is None:
        Y0 = solve_Y0(spec, xi, eta, quad)
    if Y1 is None:
        Y1 = solve_Y1(spec, xi, eta, quad, Y0)
    E = _decay_weights(spec, quad)
    s_nodes = quad.grid()
    F = _slow_inner_integral(spec, xi, eta, quad, Y0)
    arg = Y0 + spec.sigma * eta[:, None, :]
    gx, gy = spec.g_jac(np.broadcast_to(xi, arg.shape[:-1] + (spec.n,)), arg)
    drive = s_nodes[:, None, None] * (xi @ spec.A.T)[None, :, :] + F
    integrand = np.einsum("kpij,kpj->kpi", gx, drive) + np.einsum(
        "kpij,kpj->kpi", gy, Y1
    )
    integrand = np.einsum("kij,kpj->kpi", E, integrand)
    return _simpson(integrand, quad.grid())


@dataclass(frozen=True)
class ManifoldApproximation:
    """Evaluator for h0, h1 and h_eps = h0 + eps*h1 on a fixed noise.

    mode "quadrature" runs the generic machinery; "analytic-particle"
    uses the cellular-flow closed forms (requires frozen integrals).
    """

    spec: SlowFastSpec
    quad: QuadratureParams
    mode: str = "quadrature"
    eta: Optional[np.ndarray] = None
    frozen: Optional[object] = None
    particle_params: Optional[object] = None

    @classmethod
    def build(cls, spec, quad, noise=None, eta=None):
        if eta is None:
            if noise is None:
                raise ValidationError("either a noise realization or an eta path is required")
            eta = rescaled_ou_path(spec, noise, quad)
        quad.check_truncation(_beta_of(spec))
        return cls(spec=spec, quad=quad, mode="quadrature", eta=eta)

    @classmethod
    def analytic_particle(cls, params, frozen, quad=None):
        from .particle import particle_spec

        return cls(
            spec=particle_spec(params),
            quad=quad or QuadratureParams(),
            mode="analytic-particle",
            frozen=frozen,
            particle_params=params,
        )

    def _squeeze(self, xi, out):
        return out[0] if np.asarray(xi).ndim == 1 else out

    def h0(self, xi):
        if self.mode == "analytic-particle":
            from .particle import analytic_h0

            return analytic_h0(xi, self.particle_params)
        out = compute_h0(self.spec, xi, self.eta, self.quad)
        return self._squeeze(xi, out)

    def h1(self, xi):
        if self.mode == "analytic-particle":
            from .particle import analytic_h1

            return analytic_h1(xi, self.particle_params, self.frozen)
        xi2 = np.atleast_2d(np.asarray(xi, dtype=float))
        Y0 = solve_Y0(self.spec, xi2, self.eta, self.quad)
        out = compute_h1(self.spec, xi2, self.eta, self.quad, Y0=Y0)
        return self._squeeze(xi, out)

    def h_eps(self, xi):
        if self.mode == "analytic-particle":
            return self.h0(xi) + self.spec.epsilon * self.h1(xi)
        xi2 = np.atleast_2d(np.asarray(xi, dtype=float))
        Y0 = solve_Y0(self.spec, xi2, self.eta, self.quad)
        h0 = compute_h0(self.spec, xi2, self.eta, self.quad, Y0=Y0)
        h1 = compute_h1(self.spec, xi2, self.eta, self.quad, Y0=Y0)
        return self._squeeze(xi, h0 + self.spec.epsilon * h1)

    def eta_at_zero(self):
        """Value of the rescaled stationary noise at time 0."""
        if self.mode == "analytic-particle":
            return self.frozen.i_e if self.frozen is not None else np.zeros(self.spec.m)
        return self.eta[-1]


def reduced_rhs(xi, t, approx: ManifoldApproximation, noise_state=None):
    """Slow vector field A xi + f(xi, sigma*eta(0) + h_eps(xi)).

    Frozen mode (the literal reading): the stationary noise value and
    the manifold's Gaussian integrals stay pinned at time 0, so ``t``
    does not enter.  Evolving-mode dynamics for the particle model are
    provided by the integrators via time-dependent noise state.
    """
    spec = approx.spec
    xi = np.asarray(xi, dtype=float)
    fast = spec.sigma * approx.eta_at_zero() + approx.h_eps(xi)
    return xi @ spec.A.T + spec.f(xi, fast)
