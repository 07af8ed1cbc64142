"""Numba kernels for pathwise integration of the reduced particle system.

Grid studies integrate millions of paths; these kernels keep that at
native speed on one core.  All stochastic draws go through the
counter-based generator in :mod:`slowfast.rng`, keyed by
(master_seed, (cell index, path index), step counter), so results are
bit-identical for any execution order or worker split.

Side codes: 0 left (xi1=0), 1 right (xi1=pi), 2 top (xi2=0),
3 bottom (xi2=pi, settling); -1 censored at the threshold time.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, uint64

from .rng import normals4_jit

PI = math.pi

SIDE_CENSORED = -1
SIDE_LEFT, SIDE_RIGHT, SIDE_TOP, SIDE_BOTTOM = 0, 1, 2, 3

_PURPOSE_EVOLVE = uint64(6)
_PURPOSE_FROZEN_KERNEL = uint64(4)


@njit(cache=True)
def _exit_fraction(x0, y0, x1, y1):
    """First boundary crossing within a step, linearly interpolated.

    Returns (fraction, side); fraction > 1 means no crossing.  Checked
    in order left, top, right, bottom so exact ties resolve to
    left/top.
    """
    best = 1.0e30
    side = -1
    if x1 <= 0.0 and x1 != x0:
        f = (0.0 - x0) / (x1 - x0)
        if f < best:
            best = f
            side = SIDE_LEFT
    if y1 <= 0.0 and y1 != y0:
        f = (0.0 - y0) / (y1 - y0)
        if f < best:
            best = f
            side = SIDE_TOP
    if x1 >= PI and x1 != x0:
        f = (PI - x0) / (x1 - x0)
        if f < best:
            best = f
            side = SIDE_RIGHT
    if y1 >= PI and y1 != y0:
        f = (PI - y0) / (y1 - y0)
        if f < best:
            best = f
            side = SIDE_BOTTOM
    return best, side


@njit(cache=True)
def _drift(x, y, a, V, eps, sg, e1, e2, z1, z2):
    s1 = math.sin(x)
    c1 = math.cos(x)
    s2 = math.sin(y)
    c2 = math.cos(y)
    d1 = sg * e1 + a * s1 * c2 + eps * (
        -a * a * s1 * c1 + a * V * s1 * s2 + a * sg * c1 * c2 * z1 - a * sg * s1 * s2 * z2
    )
    d2 = sg * e2 + V - a * c1 * s2 + eps * (
        -a * a * s2 * c2 + a * V * c1 * c2 + a * sg * s1 * s2 * z1 - a * sg * c1 * c2 * z2
    )
    return d1, d2


@njit(cache=True)
def _rk4_step(x, y, dt, a, V, eps, sg, e1, e2, z1, z2):
    k1x, k1y = _drift(x, y, a, V, eps, sg, e1, e2, z1, z2)
    k2x, k2y = _drift(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, a, V, eps, sg, e1, e2, z1, z2)
    k3x, k3y = _drift(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y, a, V, eps, sg, e1, e2, z1, z2)
    k4x, k4y = _drift(x + dt * k3x, y + dt * k3y, a, V, eps, sg, e1, e2, z1, z2)
    xn = x + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
    yn = y + dt * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
    return xn, yn


@njit(cache=True)
def reduced_frozen_exit_batch(
    x0s, y0s, e1s, e2s, z1s, z2s, a, V, eps, sg, dt, t_max, exit_times, exit_sides
):
    """Exit time and side for a batch of frozen-mode paths.

    Each path is a deterministic RK4 orbit of the reduced field with
    its own frozen noise constants; censored paths get time t_max and
    side -1.
    """
    n_steps = int(round(t_max / dt))
    for i in range(x0s.size):
        x = x0s[i]
        y = y0s[i]
        e1 = e1s[i]
        e2 = e2s[i]
        z1 = z1s[i]
        z2 = z2s[i]
        exit_times[i] = t_max
        exit_sides[i] = SIDE_CENSORED
        t = 0.0
        for _ in range(n_steps):
            xn, yn = _rk4_step(x, y, dt, a, V, eps, sg, e1, e2, z1, z2)
            if xn <= 0.0 or xn >= PI or yn <= 0.0 or yn >= PI:
                frac, side = _exit_fraction(x, y, xn, yn)
                exit_times[i] = t + frac * dt
                exit_sides[i] = side
                break
            x = xn
            y = yn
            t += dt


@njit(cache=True)
def reduced_frozen_path(x0, y0, e1, e2, z1, z2, a, V, eps, sg, dt, n_steps, record_every):
    """One frozen-mode orbit with recorded states.

    Returns (times, states, exit_time, exit_side); recording continues
    past a boundary crossing is NOT done - integration stops there.
    """
    n_rec = n_steps // record_every + 1
    times = np.empty(n_rec)
    states = np.empty((n_rec, 2))
    x = x0
    y = y0
    times[0] = 0.0
    states[0, 0] = x
    states[0, 1] = y
    exit_time = -1.0
    exit_side = SIDE_CENSORED
    n_kept = 1
    t = 0.0
    for k in range(n_steps):
        xn, yn = _rk4_step(x, y, dt, a, V, eps, sg, e1, e2, z1, z2)
        if exit_side == SIDE_CENSORED and (xn <= 0.0 or xn >= PI or yn <= 0.0 or yn >= PI):
            frac, side = _exit_fraction(x, y, xn, yn)
            exit_time = t + frac * dt
            exit_side = side
        x = xn
        y = yn
        t += dt
        if (k + 1) % record_every == 0:
            times[n_kept] = t
            states[n_kept, 0] = x
            states[n_kept, 1] = y
            n_kept += 1
    return times[:n_kept], states[:n_kept], exit_time, exit_side


@njit(cache=True)
def _update_aux(rho, zeta, h, z):
    """Exact-in-law half-step of (rho, zeta): d rho = -rho dt + dW,
    d zeta = (-zeta - rho) dt (trapezoidal)."""
    e = math.exp(-h)
    std = math.sqrt((1.0 - math.exp(-2.0 * h)) / 2.0)
    rho_new = e * rho + std * z
    zeta_new = (zeta * (1.0 - 0.5 * h) - 0.5 * h * (rho + rho_new)) / (1.0 + 0.5 * h)
    return rho_new, zeta_new


@njit(cache=True)
def reduced_evolving_exit_batch(
    x0s,
    y0s,
    r1s,
    r2s,
    q1s,
    q2s,
    key0,
    stream_keys,
    a,
    V,
    eps,
    sg,
    dt,
    t_max,
    exit_times,
    exit_sides,
):
    """Evolving-mode batch: the Gaussian integrals become stationary
    auxiliary processes updated in two half-steps per RK4 step."""
    n_steps = int(round(t_max / dt))
    for i in range(x0s.size):
        x = x0s[i]
        y = y0s[i]
        r1 = r1s[i]
        r2 = r2s[i]
        q1 = q1s[i]
        q2 = q2s[i]
        key1 = stream_keys[i]
        exit_times[i] = t_max
        exit_sides[i] = SIDE_CENSORED
        t = 0.0
        for k in range(n_steps):
            za, zb, zc, zd = normals4_jit(key0, key1, uint64(k), _PURPOSE_EVOLVE)
            r1m, q1m = _update_aux(r1, q1, 0.5 * dt, za)
            r2m, q2m = _update_aux(r2, q2, 0.5 * dt, zb)
            r1n, q1n = _update_aux(r1m, q1m, 0.5 * dt, zc)
            r2n, q2n = _update_aux(r2m, q2m, 0.5 * dt, zd)
            k1x, k1y = _drift(x, y, a, V, eps, sg, r1, r2, q1, q2)
            k2x, k2y = _drift(
                x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, a, V, eps, sg, r1m, r2m, q1m, q2m
            )
            k3x, k3y = _drift(
                x + 0.5 * dt * k2x, y + 0.5 * dt * k2y, a, V, eps, sg, r1m, r2m, q1m, q2m
            )
            k4x, k4y = _drift(x + dt * k3x, y + dt * k3y, a, V, eps, sg, r1n, r2n, q1n, q2n)
            xn = x + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
            yn = y + dt * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
            if xn <= 0.0 or xn >= PI or yn <= 0.0 or yn >= PI:
                frac, side = _exit_fraction(x, y, xn, yn)
                exit_times[i] = t + frac * dt
                exit_sides[i] = side
                break
            x = xn
            y = yn
            r1, r2, q1, q2 = r1n, r2n, q1n, q2n
            t += dt


@njit(cache=True)
def full_rde_path(
    y1,
    y2,
    v1,
    v2,
    eta1,
    eta2,
    key0,
    key1,
    a,
    V,
    eps,
    sg,
    dt,
    n_steps,
    record_every,
):
    """Full 4-D system in its pathwise (random ODE) form.

    Takes the transformed velocity w = v - sigma*eta^eps; the w
    relaxation and the stationary forcing eta^eps are updated exactly
    per step (exponential integrator); the position uses trapezoidal
    averages.  Recorded states carry the physical velocity
    v = w + sigma*eta.  Returns (times, states(n,4), exit_time,
    exit_side) with exit detection on the position components.
    """
    n_rec = n_steps // record_every + 1
    times = np.empty(n_rec)
    states = np.empty((n_rec, 4))
    times[0] = 0.0
    states[0, 0] = y1
    states[0, 1] = y2
    states[0, 2] = v1 + sg * eta1
    states[0, 3] = v2 + sg * eta2
    decay = math.exp(-dt / eps)
    eta_decay = math.exp(-dt / eps)
    eta_std = math.sqrt((1.0 - math.exp(-2.0 * dt / eps)) * 0.5)
    n_kept = 1
    exit_time = -1.0
    exit_side = SIDE_CENSORED
    t = 0.0
    for k in range(n_steps):
        u1 = a * math.sin(y1) * math.cos(y2)
        u2 = V - a * math.cos(y1) * math.sin(y2)
        v1n = u1 + (v1 - u1) * decay
        v2n = u2 + (v2 - u2) * decay
        za, zb, _, _ = normals4_jit(key0, key1, uint64(k), uint64(2))
        eta1n = eta_decay * eta1 + eta_std * za
        eta2n = eta_decay * eta2 + eta_std * zb
        y1n = y1 + 0.5 * dt * ((v1 + v1n) + sg * (eta1 + eta1n))
        y2n = y2 + 0.5 * dt * ((v2 + v2n) + sg * (eta2 + eta2n))
        if exit_side == SIDE_CENSORED and (
            y1n <= 0.0 or y1n >= PI or y2n <= 0.0 or y2n >= PI
        ):
            frac, side = _exit_fraction(y1, y2, y1n, y2n)
            exit_time = t + frac * dt
            exit_side = side
        y1, y2, v1, v2, eta1, eta2 = y1n, y2n, v1n, v2n, eta1n, eta2n
        t += dt
        if (k + 1) % record_every == 0:
            times[n_kept] = t
            states[n_kept, 0] = y1
            states[n_kept, 1] = y2
            states[n_kept, 2] = v1 + sg * eta1
            states[n_kept, 3] = v2 + sg * eta2
            n_kept += 1
    return times[:n_kept], states[:n_kept], exit_time, exit_side


@njit(cache=True)
def reduced_evolving_path(
    x0, y0, r1, r2, q1, q2, key0, key1, a, V, eps, sg, dt, n_steps, record_every
):
    """One evolving-mode orbit with recorded states.

    Same stepping as the evolving batch kernel; integration does not
    stop at the boundary (the first crossing is reported alongside).
    """
    n_rec = n_steps // record_every + 1
    times = np.empty(n_rec)
    states = np.empty((n_rec, 2))
    x = x0
    y = y0
    times[0] = 0.0
    states[0, 0] = x
    states[0, 1] = y
    exit_time = -1.0
    exit_side = SIDE_CENSORED
    n_kept = 1
    t = 0.0
    for k in range(n_steps):
        za, zb, zc, zd = normals4_jit(key0, key1, uint64(k), _PURPOSE_EVOLVE)
        r1m, q1m = _update_aux(r1, q1, 0.5 * dt, za)
        r2m, q2m = _update_aux(r2, q2, 0.5 * dt, zb)
        r1n, q1n = _update_aux(r1m, q1m, 0.5 * dt, zc)
        r2n, q2n = _update_aux(r2m, q2m, 0.5 * dt, zd)
        k1x, k1y = _drift(x, y, a, V, eps, sg, r1, r2, q1, q2)
        k2x, k2y = _drift(
            x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, a, V, eps, sg, r1m, r2m, q1m, q2m
        )
        k3x, k3y = _drift(
            x + 0.5 * dt * k2x, y + 0.5 * dt * k2y, a, V, eps, sg, r1m, r2m, q1m, q2m
        )
        k4x, k4y = _drift(x + dt * k3x, y + dt * k3y, a, V, eps, sg, r1n, r2n, q1n, q2n)
        xn = x + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        yn = y + dt * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        if exit_side == SIDE_CENSORED and (xn <= 0.0 or xn >= PI or yn <= 0.0 or yn >= PI):
            frac, side = _exit_fraction(x, y, xn, yn)
            exit_time = t + frac * dt
            exit_side = side
        x = xn
        y = yn
        r1, r2, q1, q2 = r1n, r2n, q1n, q2n
        t += dt
        if (k + 1) % record_every == 0:
            times[n_kept] = t
            states[n_kept, 0] = x
            states[n_kept, 1] = y
            n_kept += 1
    return times[:n_kept], states[:n_kept], exit_time, exit_side


@njit(cache=True)
def full_rk4_path(y1, y2, v1, v2, a, V, eps, dt, n_steps, record_every):
    """Deterministic full system by classic RK4 (sigma = 0 only)."""
    n_rec = n_steps // record_every + 1
    times = np.empty(n_rec)
    states = np.empty((n_rec, 4))
    times[0] = 0.0
    states[0, 0] = y1
    states[0, 1] = y2
    states[0, 2] = v1
    states[0, 3] = v2
    n_kept = 1
    t = 0.0
    for k in range(n_steps):
        a1, b1, c1, d1 = _full_drift(y1, y2, v1, v2, a, V, eps)
        a2, b2, c2, d2 = _full_drift(
            y1 + 0.5 * dt * a1, y2 + 0.5 * dt * b1, v1 + 0.5 * dt * c1, v2 + 0.5 * dt * d1, a, V, eps
        )
        a3, b3, c3, d3 = _full_drift(
            y1 + 0.5 * dt * a2, y2 + 0.5 * dt * b2, v1 + 0.5 * dt * c2, v2 + 0.5 * dt * d2, a, V, eps
        )
        a4, b4, c4, d4 = _full_drift(
            y1 + dt * a3, y2 + dt * b3, v1 + dt * c3, v2 + dt * d3, a, V, eps
        )
        y1 += dt * (a1 + 2 * a2 + 2 * a3 + a4) / 6.0
        y2 += dt * (b1 + 2 * b2 + 2 * b3 + b4) / 6.0
        v1 += dt * (c1 + 2 * c2 + 2 * c3 + c4) / 6.0
        v2 += dt * (d1 + 2 * d2 + 2 * d3 + d4) / 6.0
        t += dt
        if (k + 1) % record_every == 0:
            times[n_kept] = t
            states[n_kept, 0] = y1
            states[n_kept, 1] = y2
            states[n_kept, 2] = v1
            states[n_kept, 3] = v2
            n_kept += 1
    return times[:n_kept], states[:n_kept]


@njit(cache=True)
def _full_drift(y1, y2, v1, v2, a, V, eps):
    u1 = a * math.sin(y1) * math.cos(y2)
    u2 = V - a * math.cos(y1) * math.sin(y2)
    return v1, v2, (u1 - v1) / eps, (u2 - v2) / eps
