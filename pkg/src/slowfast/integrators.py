"""Time integration of the full 4-D particle system and its 2-D reduction.

The canonical route for the full system is its pathwise (random ODE)
form: the white-noise channel is traded for a stationary OU forcing of
the velocity, v = w + sigma * eta^eps(t), and the resulting smooth
system is stepped with an exponential integrator that treats the stiff
-1/eps relaxation exactly.  A direct Euler-Maruyama discretization of
the original SDE is kept as an independent cross-check.

Full and reduced runs driven by the same :class:`NoiseRealization`
share the noise sample: the reduced system's frozen constant I_e is
exactly the forcing value eta^eps(0) used to start the full run.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels, rng
from .noise import (
    FrozenIntegrals,
    NoiseRealization,
    sample_frozen_integrals,
    stationary_auxiliary_pair,
)
from .particle import (
    SIDES,
    CellDomain,
    ParticleParams,
    analytic_h0,
    analytic_h1,
    flow_velocity,
)
from .systems import ValidationError

SCHEMES = ("exponential-em", "euler-maruyama", "rk4-deterministic")


class IntegrationError(RuntimeError):
    """Raised on non-finite states; carries the last valid sample."""

    def __init__(self, message, last_time=None, last_state=None):
        super().__init__(message)
        self.last_time = last_time
        self.last_state = last_state


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_max: float = 1000.0
    scheme: str = "exponential-em"
    record_every: int = 1

    def __post_init__(self):
        if self.dt <= 0 or self.t_max <= 0:
            raise ValidationError("dt and t_max must be positive")
        if self.scheme not in SCHEMES:
            raise ValidationError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.record_every < 1:
            raise ValidationError("record_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_max / self.dt)))


@dataclass(frozen=True)
class ExitEvent:
    time: float
    side: str
    point: tuple


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    exit_event: Optional[ExitEvent] = None

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValidationError("trajectory times must be strictly increasing")

    def to_csv(self, path, labels=None):
        """One row per sample: t, state components, exit metadata."""
        d = self.states.shape[1]
        labels = labels or [f"x{i + 1}" for i in range(d)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + list(labels) + ["exit_time", "exit_side"])
            et = "" if self.exit_event is None else f"{self.exit_event.time:.12g}"
            es = "" if self.exit_event is None else self.exit_event.side
            for t, s in zip(self.times, self.states):
                w.writerow([f"{t:.12g}"] + [f"{v:.12g}" for v in s] + [et, es])


def detect_exit(prev, curr, t_prev, dt, domain: CellDomain = CellDomain()):
    """First boundary crossing within one step, or None.

    Linear interpolation between the two states' position components;
    when two sides are crossed in the same step the earlier interpolated
    time wins, with left-then-top priority on an exact tie.
    """
    frac, code = kernels._exit_fraction(prev[0], prev[1], curr[0], curr[1])
    if code < 0:
        return None
    point = (
        prev[0] + frac * (curr[0] - prev[0]),
        prev[1] + frac * (curr[1] - prev[1]),
    )
    return ExitEvent(time=t_prev + frac * dt, side=SIDES[code], point=point)


def first_exit(times, states, domain: CellDomain = CellDomain()):
    """Scan a recorded path for its first boundary crossing.

    A start on or beyond the boundary exits immediately (probability-1
    semantics for boundary initial conditions).
    """
    x0 = states[0]
    side = domain.side_of_boundary_point((x0[0], x0[1]))
    if side is not None:
        return ExitEvent(time=float(times[0]), side=side, point=(float(x0[0]), float(x0[1])))
    pos = states[:, :2]
    out = (
        (pos[:, 0] <= domain.lo)
        | (pos[:, 0] >= domain.hi)
        | (pos[:, 1] <= domain.lo)
        | (pos[:, 1] >= domain.hi)
    )
    hits = np.flatnonzero(out)
    if hits.size == 0:
        return None
    k = int(hits[0])
    return detect_exit(pos[k - 1], pos[k], float(times[k - 1]), float(times[k] - times[k - 1]), domain)


def _check_finite(times, states):
    bad = ~np.all(np.isfinite(states), axis=-1)
    if np.any(bad):
        k = int(np.argmax(bad))
        last = max(0, k - 1)
        raise IntegrationError(
            f"non-finite state at t = {times[k]:.6g}",
            last_time=float(times[last]),
            last_state=np.array(states[last]),
        )


def _stream_keys(noise: NoiseRealization):
    return np.uint64(noise.master_seed), rng.stream_key(noise.stream_id)


def integrate_full(init, p: ParticleParams, noise: NoiseRealization, cfg: IntegratorConfig):
    """Integrate the 4-D system (y1, y2, v1, v2) from a physical state.

    exponential-em is the canonical scheme; euler-maruyama steps the
    original SDE directly (requires dt < eps/2 and a noise grid equal
    to the integration grid); rk4-deterministic requires sigma = 0.
    """
    init = np.asarray(init, dtype=float)
    if init.shape != (4,):
        raise ValidationError("full-system initial state must have 4 components")
    if cfg.scheme == "euler-maruyama":
        return _integrate_full_em(init, p, noise, cfg)
    if cfg.scheme == "rk4-deterministic":
        if p.sigma != 0:
            raise ValidationError("rk4-deterministic requires sigma = 0")
        times, states = kernels.full_rk4_path(
            init[0], init[1], init[2], init[3],
            p.a, p.V, p.epsilon, cfg.dt, cfg.n_steps, cfg.record_every,
        )
        _check_finite(times, states)
        return Trajectory(times=times, states=states, exit_event=first_exit(times, states))
    if p.sigma > 0:
        if noise is None:
            raise ValidationError("sigma > 0 requires a noise realization")
        key0, key1 = _stream_keys(noise)
        frozen = sample_frozen_integrals(noise)
    else:
        key0, key1 = np.uint64(0), np.uint64(0)
        frozen = FrozenIntegrals(i_e=np.zeros(2), i_se=np.zeros(2))
    eta0 = frozen.i_e  # eta^eps(0): couples this run to the frozen reduction
    w0 = init[2:] - p.sigma * eta0
    times, states, _, _ = kernels.full_rde_path(
        init[0], init[1], w0[0], w0[1], eta0[0], eta0[1],
        key0, key1, p.a, p.V, p.epsilon, p.sigma, cfg.dt, cfg.n_steps, cfg.record_every,
    )
    _check_finite(times, states)
    return Trajectory(times=times, states=states, exit_event=first_exit(times, states))


def _integrate_full_em(init, p, noise, cfg):
    if cfg.dt >= p.epsilon / 2.0:
        raise ValidationError("euler-maruyama stability guard: require dt < eps/2")
    if abs(noise.dt - cfg.dt) > 1e-12 * cfg.dt:
        raise ValidationError("euler-maruyama requires the noise grid to equal dt")
    n = cfg.n_steps
    dW = noise.increments(0.0, n * cfg.dt) if p.sigma > 0 else np.zeros((n, 2))
    amp = p.sigma / math.sqrt(p.epsilon)
    state = init.copy()
    n_rec = n // cfg.record_every + 1
    times = np.empty(n_rec)
    states = np.empty((n_rec, 4))
    times[0] = 0.0
    states[0] = state
    kept = 1
    for k in range(n):
        u = flow_velocity(state[:2], p)
        acc = (u - state[2:]) / p.epsilon
        state[:2] += cfg.dt * state[2:]
        state[2:] += cfg.dt * acc + amp * dW[k]
        if (k + 1) % cfg.record_every == 0:
            times[kept] = (k + 1) * cfg.dt
            states[kept] = state
            kept += 1
    times, states = times[:kept], states[:kept]
    _check_finite(times, states)
    return Trajectory(times=times, states=states, exit_event=first_exit(times, states))


def integrate_reduced(
    init,
    p: ParticleParams,
    noise: Optional[NoiseRealization],
    cfg: IntegratorConfig,
    mode: str = "frozen",
):
    """Integrate the reduced 2-D system (xi1, xi2).

    The RHS is smooth in time in both modes, so a fixed-step RK4 is
    used regardless of cfg.scheme.  ``noise`` may be None when
    sigma = 0.
    """
    init = np.asarray(init, dtype=float)
    if init.shape != (2,):
        raise ValidationError("reduced initial state must have 2 components")
    if p.sigma > 0 and noise is None:
        raise ValidationError("sigma > 0 requires a noise realization")
    if mode == "frozen":
        if p.sigma > 0:
            frozen = sample_frozen_integrals(noise)
        else:
            frozen = FrozenIntegrals(i_e=np.zeros(2), i_se=np.zeros(2))
        times, states, _, _ = kernels.reduced_frozen_path(
            init[0], init[1],
            frozen.i_e[0], frozen.i_e[1], frozen.i_se[0], frozen.i_se[1],
            p.a, p.V, p.epsilon, p.sigma, cfg.dt, cfg.n_steps, cfg.record_every,
        )
    elif mode == "evolving":
        if p.sigma > 0:
            rho, zeta = stationary_auxiliary_pair(noise)
            key0, key1 = _stream_keys(noise)
        else:
            rho = zeta = np.zeros(2)
            key0, key1 = np.uint64(0), np.uint64(0)
        times, states, _, _ = kernels.reduced_evolving_path(
            init[0], init[1], rho[0], rho[1], zeta[0], zeta[1],
            key0, key1, p.a, p.V, p.epsilon, p.sigma, cfg.dt, cfg.n_steps, cfg.record_every,
        )
    else:
        raise ValidationError(f"unknown noise mode {mode!r}")
    _check_finite(times, states)
    return Trajectory(times=times, states=states, exit_event=first_exit(times, states))


@dataclass(frozen=True)
class DeviationReport:
    """Pairwise fidelity of the reduction against the full system.

    sup_slow_deviation: max |position_full - xi_reduced| over the
    shared recording grid.  sup_graph_distance: max distance of the
    full system's transformed velocity from the manifold graph
    evaluated along its own path, over [t_lo, t_hi].
    """

    sup_slow_deviation: float
    sup_graph_distance: float
    t_window: tuple
    epsilon: float


def manifold_graph_distance(traj: Trajectory, p: ParticleParams, frozen, t_lo, t_hi):
    """sup_t |w(t) - h_eps(y(t))| for a full-system trajectory.

    w is the transformed velocity v - sigma*I_e (the OU forcing value
    is only known exactly at t = 0, so for sigma > 0 this is itself an
    O(sigma) proxy; the primary use is sigma = 0 order checks).
    """
    sel = (traj.times >= t_lo) & (traj.times <= t_hi)
    if not np.any(sel):
        raise ValidationError("empty time window")
    pos = traj.states[sel, :2]
    vel = traj.states[sel, 2:]
    if frozen is None:
        frozen = FrozenIntegrals(i_e=np.zeros(2), i_se=np.zeros(2))
    w = vel - p.sigma * frozen.i_e
    graph = analytic_h0(pos, p) + p.epsilon * analytic_h1(pos, p, frozen)
    return float(np.max(np.linalg.norm(w - graph, axis=-1)))


def compare_full_reduced(init_slow, p: ParticleParams, noise, cfg: IntegratorConfig, t_window=None):
    """Run full (started on the manifold graph) and reduced from one xi.

    Both runs consume the same noise realization, so the frozen
    constants of the reduction equal the OU forcing state of the full
    run at t = 0.
    """
    init_slow = np.asarray(init_slow, dtype=float)
    if p.sigma > 0:
        frozen = sample_frozen_integrals(noise)
    else:
        frozen = FrozenIntegrals(i_e=np.zeros(2), i_se=np.zeros(2))
    h = analytic_h0(init_slow, p) + p.epsilon * analytic_h1(init_slow, p, frozen)
    v0 = p.sigma * frozen.i_e + h
    full = integrate_full(np.concatenate([init_slow, v0]), p, noise, cfg)
    red = integrate_reduced(init_slow, p, noise, cfg, mode="frozen")
    n = min(len(full.times), len(red.times))
    dev = float(np.max(np.linalg.norm(full.states[:n, :2] - red.states[:n], axis=-1)))
    if t_window is None:
        t_window = (min(1.0, cfg.t_max / 2.0), cfg.t_max)
    dist = manifold_graph_distance(full, p, frozen, *t_window)
    return DeviationReport(
        sup_slow_deviation=dev,
        sup_graph_distance=dist,
        t_window=tuple(t_window),
        epsilon=p.epsilon,
    )
