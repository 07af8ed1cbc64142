"""Reproducible Wiener paths and derived Ornstein-Uhlenbeck processes.

A :class:`NoiseRealization` never stores a path; increments are
recomputed on demand from the counter-based generator, so shift and
rescale views are cheap index/scale remappings of the same underlying
draws.  OU paths use the exact one-step transition (matrix exponential
plus exact step covariance), which stays unbiased for the stiff
``B/epsilon`` drift at any step size.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cholesky, expm, solve_continuous_lyapunov

from . import rng

# Two-sided time axis: step index k covers [k*dt, (k+1)*dt); counters
# must be nonnegative, so indices are biased by 2^62.
_INDEX_BIAS = 1 << 62


class NoiseError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseRealization:
    """A two-sided Wiener path on [t_min, t_max], lazily generated.

    ``stream_id`` is a (grid index, path index) pair; distinct streams
    are independent, identical streams regenerate bit-identically.
    """

    master_seed: int
    dt: float
    t_min: float
    t_max: float
    stream_id: tuple[int, int] = (0, 0)
    components: int = 2
    _offset: int = 0
    _scale: float = 1.0
    _base_dt: float = field(default=0.0)

    def __post_init__(self):
        if self.dt <= 0:
            raise NoiseError("dt must be positive")
        if not self.t_min < 0 < self.t_max:
            raise NoiseError("two-sided path requires t_min < 0 < t_max")
        if self.components > 4:
            raise NoiseError("at most 4 noise components per realization")
        if self._base_dt == 0.0:
            object.__setattr__(self, "_base_dt", self.dt)

    @property
    def _key1(self):
        return rng.stream_key(self.stream_id)

    def _step_index(self, t):
        k = round(t / self.dt)
        if abs(k * self.dt - t) > 1e-9 * self.dt:
            raise NoiseError(f"time {t} is not on the dt={self.dt} grid")
        return k

    def increments(self, t0, t1):
        """Wiener increments over consecutive steps of [t0, t1].

        Returns an array of shape (steps, components); row k is
        W(t0+(k+1)dt) - W(t0+k dt), distributed N(0, dt).
        """
        i0 = self._step_index(t0)
        i1 = self._step_index(t1)
        if i1 <= i0:
            raise NoiseError("t1 must exceed t0 by at least one step")
        blocks = np.arange(i0, i1, dtype=np.int64) + (self._offset + _INDEX_BIAS)
        z = rng.normals(self.master_seed, self._key1, blocks.astype(np.uint64), rng.PURPOSE_WIENER)
        return z[:, : self.components] * (self._scale * math.sqrt(self._base_dt))

    def shifted(self, t):
        """Wiener shift view: increments re-based so time t becomes 0."""
        k = self._step_index(t)
        return replace(
            self,
            t_min=self.t_min - t,
            t_max=self.t_max - t,
            _offset=self._offset + k,
        )

    def rescaled(self, epsilon):
        """Brownian rescale view reading W(t*eps)/sqrt(eps).

        One view step consumes one base step, so the view's grid
        spacing is dt/epsilon in rescaled time.
        """
        if epsilon <= 0:
            raise NoiseError("epsilon must be positive")
        return replace(
            self,
            dt=self.dt / epsilon,
            t_min=self.t_min / epsilon,
            t_max=self.t_max / epsilon,
            _scale=self._scale / math.sqrt(epsilon),
        )

    def _normal_blocks(self, purpose, start, count, width):
        """(count, width) standard normals from disjoint counter blocks."""
        need = count * ((width + 3) // 4)
        base = start + self._offset + _INDEX_BIAS
        blocks = (np.arange(need, dtype=np.int64) + base).astype(np.uint64)
        z = rng.normals(self.master_seed, self._key1, blocks, purpose)
        return z.reshape(count, -1)[:, :width]


@dataclass(frozen=True)
class FrozenIntegrals:
    """Realizations of the stationary Gaussian integrals I_e, I_se.

    Per component: I_e = \\int_{-inf}^0 e^s dW_s and
    I_se = \\int_{-inf}^0 s e^s dW_s, jointly Gaussian with
    Var(I_e)=1/2, Var(I_se)=1/4, Cov=-1/4 (Ito isometry).
    """

    i_e: np.ndarray
    i_se: np.ndarray

    VAR_IE = 0.5
    VAR_ISE = 0.25
    COV = -0.25


def sample_frozen_integrals(noise: NoiseRealization) -> FrozenIntegrals:
    """Draw (I_e, I_se) per component from the exact bivariate law."""
    m = noise.components
    z = noise._normal_blocks(rng.PURPOSE_FROZEN, 0, 1, 2 * m).reshape(m, 2)
    # Cholesky factor of [[1/2, -1/4], [-1/4, 1/4]]
    l11 = math.sqrt(0.5)
    l21 = -0.25 / l11
    l22 = math.sqrt(0.25 - l21 * l21)
    i_e = l11 * z[:, 0]
    i_se = l21 * z[:, 0] + l22 * z[:, 1]
    return FrozenIntegrals(i_e=i_e, i_se=i_se)


def frozen_integrals_from_ou_path(times, eta) -> FrozenIntegrals:
    """Pathwise frozen integrals consistent with a given unit OU path.

    For the stationary OU process eta (drift -1, unit diffusion) on a
    grid covering [-T, 0]:  I_e = eta(0), and pathwise
    I_se = \\int_{-inf}^0 e^s \\int_0^s eta(r) dr ds  (Fubini identity),
    evaluated with cumulative-trapezoid / Simpson on the given nodes.
    """
    times = np.asarray(times)
    eta = np.asarray(eta)
    i_e = eta[-1].copy()
    inner = _cumtrapz_from_zero(times, eta)
    integrand = np.exp(times)[:, None] * inner
    i_se = _simpson(integrand, times)
    return FrozenIntegrals(i_e=np.atleast_1d(i_e), i_se=np.atleast_1d(i_se))


def _cumtrapz_from_zero(times, values):
    """\\int_0^{s} values dr at each node s of a grid ending at 0."""
    dt = np.diff(times).reshape((-1,) + (1,) * (values.ndim - 1))
    seg = 0.5 * (values[1:] + values[:-1]) * dt
    back = np.concatenate([np.zeros((1,) + values.shape[1:]), np.cumsum(seg, axis=0)])
    return back - back[-1]


def _simpson(values, times):
    """Composite Simpson on a uniform grid (odd point count required)."""
    n = len(times)
    h = (times[-1] - times[0]) / (n - 1)
    if n % 2 == 0:
        # trapezoid on the first interval, Simpson on the rest
        head = 0.5 * h * (values[0] + values[1])
        return head + _simpson(values[1:], times[1:])
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (h / 3.0) * np.tensordot(w, values, axes=(0, 0))


def stationary_covariance(B, epsilon, sigma):
    """Lyapunov solution for dy = (B/eps) y dt + (sigma/sqrt(eps)) dW."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if np.any(np.real(np.linalg.eigvals(B)) >= 0):
        raise NoiseError("B must be stable (eigenvalues in the left half plane)")
    if sigma == 0:
        return np.zeros_like(B)
    return solve_continuous_lyapunov(B / epsilon, -(sigma**2 / epsilon) * np.eye(B.shape[0]))


def simulate_ou(B, epsilon, sigma, noise: NoiseRealization, t0, t1):
    """Exact-in-distribution OU path at the noise grid nodes of [t0, t1].

    Returns (times, values) with values[k] the state at times[k];
    values[0] is drawn from the stationary law (no spin-up needed).
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    m = B.shape[0]
    if not (noise.t_min <= t0 < t1 <= noise.t_max):
        raise NoiseError("[t0, t1] must lie inside the realization extent")
    dt = noise.dt
    beta = -np.max(np.real(np.linalg.eigvals(B)))
    if dt >= epsilon / beta:
        warnings.warn(
            "dt exceeds the OU relaxation scale eps/beta; the exact "
            "update remains unbiased but the path is undersampled",
            stacklevel=2,
        )
    i0 = noise._step_index(t0)
    i1 = noise._step_index(t1)
    n = i1 - i0
    times = t0 + dt * np.arange(n + 1)
    P = stationary_covariance(B, epsilon, sigma)
    Ad = expm((B / epsilon) * dt)
    values = np.zeros((n + 1, m))
    if sigma == 0:
        return times, values
    Sd = P - Ad @ P @ Ad.T
    L0 = cholesky(P, lower=True)
    Ld = cholesky(Sd + 1e-300 * np.eye(m), lower=True)
    z0 = noise._normal_blocks(rng.PURPOSE_OU_INIT, i0, 1, m)[0]
    z = noise._normal_blocks(rng.PURPOSE_OU, i0, n, m)
    values[0] = L0 @ z0
    for k in range(n):
        values[k + 1] = Ad @ values[k] + Ld @ z[k]
    return times, values


def evolve_auxiliary_integrals(state, dW, dt):
    """One step of the stationary auxiliary pair (rho, zeta).

    rho(t) = \\int_{-inf}^t e^{s-t} dW_s obeys d rho = -rho dt + dW
    (exact exponential update); zeta(t) = \\int_{-inf}^t (s-t)e^{s-t} dW_s
    obeys d zeta = (-zeta - rho) dt (trapezoidal update).  Their
    stationary laws match :class:`FrozenIntegrals`.
    """
    if dt <= 0:
        raise NoiseError("dt must be positive")
    rho, zeta = state
    rho = np.asarray(rho, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    e = math.exp(-dt)
    rho_new = e * rho + np.asarray(dW, dtype=float)
    zeta_new = (zeta * (1.0 - 0.5 * dt) - 0.5 * dt * (rho + rho_new)) / (1.0 + 0.5 * dt)
    return rho_new, zeta_new


def stationary_auxiliary_pair(noise: NoiseRealization):
    """Draw (rho, zeta) from their joint stationary law (same as I_e, I_se)."""
    f = sample_frozen_integrals(noise)
    return f.i_e.copy(), f.i_se.copy()
