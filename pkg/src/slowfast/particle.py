"""Inertial particles in a cellular flow with gravitational settling.

Full 4-D system (position y, velocity v, Stokes drag with response
time eps, additive velocity noise):

    y1' = v1,  y2' = v2
    v1' = (-v1 + a sin y1 cos y2)/eps         + (sigma/sqrt(eps)) dW1
    v2' = (-v2 + V - a cos y1 sin y2)/eps     + (sigma/sqrt(eps)) dW2

Positive xi2 points toward the physical bottom (settling direction).
The closed-form slow-manifold terms and the reduced 2-D system live
here; the generic quadrature machinery reproduces them (tested), which
is the main cross-validation of this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import FrozenIntegrals
from .systems import SlowFastSpec, ValidationError

LEFT, RIGHT, TOP, BOTTOM = "left", "right", "top", "bottom"
SIDES = (LEFT, RIGHT, TOP, BOTTOM)
# integer codes used by the integration kernels, CSV columns keep names
SIDE_CODES = {LEFT: 0, RIGHT: 1, TOP: 2, BOTTOM: 3}


@dataclass(frozen=True)
class ParticleParams:
    a: float = 0.7
    V: float = 0.1
    epsilon: float = 0.05
    sigma: float = 0.01

    def __post_init__(self):
        if self.a <= 0:
            raise ValidationError("velocity scale a must be positive")
        if self.V < 0:
            raise ValidationError("settling velocity V must be nonnegative")
        if self.epsilon < 0 or self.sigma < 0:
            raise ValidationError("epsilon and sigma must be nonnegative")


@dataclass(frozen=True)
class CellDomain:
    """The open fluid cell (0, pi) x (0, pi).

    Sides: left xi1=0, right xi1=pi, top xi2=0, bottom xi2=pi
    (bottom is the settling direction).
    """

    lo: float = 0.0
    hi: float = math.pi

    def contains(self, xi):
        xi = np.asarray(xi)
        return (xi[..., 0] > self.lo) & (xi[..., 0] < self.hi) & (
            (xi[..., 1] > self.lo) & (xi[..., 1] < self.hi)
        )

    def side_of_boundary_point(self, xi):
        """Side label for a lattice point on the boundary (left/top priority)."""
        x1, x2 = xi
        if x1 <= self.lo:
            return LEFT
        if x2 <= self.lo:
            return TOP
        if x1 >= self.hi:
            return RIGHT
        if x2 >= self.hi:
            return BOTTOM
        return None


def flow_velocity(y, p: ParticleParams):
    """Cellular flow field plus still-fluid settling: what v relaxes to."""
    y = np.asarray(y, dtype=float)
    u1 = p.a * np.sin(y[..., 0]) * np.cos(y[..., 1])
    u2 = p.V - p.a * np.cos(y[..., 0]) * np.sin(y[..., 1])
    return np.stack([u1, u2], axis=-1)


def full_drift(state, p: ParticleParams):
    state = np.asarray(state, dtype=float)
    y = state[..., :2]
    v = state[..., 2:]
    acc = (flow_velocity(y, p) - v) / p.epsilon
    return np.concatenate([v, acc], axis=-1)


def full_diffusion(p: ParticleParams):
    d = np.zeros((4, 2))
    d[2, 0] = p.sigma / math.sqrt(p.epsilon)
    d[3, 1] = p.sigma / math.sqrt(p.epsilon)
    return d


def analytic_h0(xi, p: ParticleParams):
    """Leading slow-manifold term: the flow velocity at the position."""
    return flow_velocity(xi, p)


def analytic_h1(xi, p: ParticleParams, frozen: FrozenIntegrals):
    """First-order slow-manifold correction with sampled noise integrals."""
    xi = np.asarray(xi, dtype=float)
    s1, c1 = np.sin(xi[..., 0]), np.cos(xi[..., 0])
    s2, c2 = np.sin(xi[..., 1]), np.cos(xi[..., 1])
    a, V, sg = p.a, p.V, p.sigma
    j1, j2 = frozen.i_se[0], frozen.i_se[1]
    h1 = -a * a * s1 * c1 + a * V * s1 * s2 + a * sg * c1 * c2 * j1 - a * sg * s1 * s2 * j2
    h2 = -a * a * s2 * c2 + a * V * c1 * c2 + a * sg * s1 * s2 * j1 - a * sg * c1 * c2 * j2
    return np.stack([h1, h2], axis=-1)


def reduced_drift(xi, p: ParticleParams, noise_state=None, mode="frozen"):
    """Right-hand side of the dimension-reduced slow system.

    ``noise_state`` carries per-component pairs: in frozen mode the
    time-0 integrals (I_e, I_se); in evolving mode their stationary
    time-dependent counterparts (rho(t), zeta(t)).  With sigma=0 (or no
    noise_state) this is the deterministic slow system.
    """
    xi = np.asarray(xi, dtype=float)
    s1, c1 = np.sin(xi[..., 0]), np.cos(xi[..., 0])
    s2, c2 = np.sin(xi[..., 1]), np.cos(xi[..., 1])
    a, V, eps, sg = p.a, p.V, p.epsilon, p.sigma
    if noise_state is None or sg == 0.0:
        e1 = e2 = z1 = z2 = 0.0
    elif mode == "frozen":
        e1, e2 = noise_state.i_e[0], noise_state.i_e[1]
        z1, z2 = noise_state.i_se[0], noise_state.i_se[1]
    elif mode == "evolving":
        (e1, e2), (z1, z2) = noise_state
    else:
        raise ValidationError(f"unknown noise mode {mode!r}")
    d1 = sg * e1 + a * s1 * c2 + eps * (
        -a * a * s1 * c1 + a * V * s1 * s2 + a * sg * c1 * c2 * z1 - a * sg * s1 * s2 * z2
    )
    d2 = sg * e2 + V - a * c1 * s2 + eps * (
        -a * a * s2 * c2 + a * V * c1 * c2 + a * sg * s1 * s2 * z1 - a * sg * c1 * c2 * z2
    )
    return np.stack([d1, d2], axis=-1)


def stream_function(xi, p: ParticleParams):
    """Psi = a sin xi1 sin xi2 - V xi1; conserved when eps = sigma = 0.

    Psi = 0 is the separatrix bounding the trapped region of the
    classical (inertia-free, noise-free) motion.
    """
    xi = np.asarray(xi, dtype=float)
    return p.a * np.sin(xi[..., 0]) * np.sin(xi[..., 1]) - p.V * xi[..., 0]


def _reduced_jacobian(xi, p: ParticleParams, h=1e-6):
    """Central-difference Jacobian of the deterministic reduced drift."""
    J = np.empty((2, 2))
    for j, e in enumerate(np.eye(2)):
        J[:, j] = (reduced_drift(xi + h * e, p) - reduced_drift(xi - h * e, p)) / (2 * h)
    return J


@dataclass(frozen=True)
class Equilibrium:
    point: tuple
    eigenvalues: tuple
    kind: str  # saddle | center | spiral | node
    stable: bool


_RE_ZERO = 1e-9  # |Re lambda| below this counts as marginal (center)


def classify_eigenvalues(w):
    re = np.real(w)
    im = np.imag(w)
    if np.all(np.abs(re) < _RE_ZERO) and np.any(np.abs(im) > 0):
        return "center", False
    if np.all(np.abs(im) < _RE_ZERO):
        if re.min() < -_RE_ZERO < _RE_ZERO < re.max():
            return "saddle", False
        return "node", bool(np.all(re < 0))
    return "spiral", bool(np.all(re < 0))


def equilibria(p: ParticleParams):
    """The three equilibria of the deterministic reduced system.

    Returns [] with an explanatory status when V >= a (no wall
    equilibria: sin^{-1}(V/a) undefined).
    """
    if p.V >= p.a:
        return [], "no equilibria: V >= a"
    s_star = math.asin(p.V / p.a)
    points = [
        (0.0, s_star),
        (0.0, math.pi - s_star),
        (math.acos(p.V / p.a), math.pi / 2.0),
    ]
    out = []
    for pt in points:
        w = np.linalg.eigvals(_reduced_jacobian(np.array(pt), p))
        kind, stable = classify_eigenvalues(w)
        out.append(Equilibrium(point=pt, eigenvalues=tuple(w), kind=kind, stable=stable))
    return out, "ok"


def _integrate_until_box_exit(xi0, p, direction, box, dt=2e-3, max_steps=400_000):
    """Fixed-step RK4 orbit of the deterministic reduced field.

    ``direction`` +1 forward, -1 backward; stops when leaving ``box``
    ((lo1, hi1), (lo2, hi2)).  Returns the polyline of visited points.
    """
    (lo1, hi1), (lo2, hi2) = box
    xi = np.asarray(xi0, dtype=float).copy()
    pts = [xi.copy()]
    h = direction * dt
    for _ in range(max_steps):
        k1 = reduced_drift(xi, p)
        k2 = reduced_drift(xi + 0.5 * h * k1, p)
        k3 = reduced_drift(xi + 0.5 * h * k2, p)
        k4 = reduced_drift(xi + h * k3, p)
        xi = xi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        pts.append(xi.copy())
        if not (lo1 < xi[0] < hi1 and lo2 < xi[1] < hi2):
            break
    return np.array(pts)


def trace_manifolds(p: ParticleParams, delta=1e-6, box=((-math.pi, 2 * math.pi),) * 2):
    """Stable manifold of the upper saddle and unstable of the lower.

    Both wall saddles sit on xi1 = 0; each curve is traced from
    eigenvector offsets +-delta and returned as one ordered polyline
    through the saddle.  Requires sigma = 0 dynamics, eps > 0, 0 < V < a.
    """
    if not (0.0 < p.V < p.a):
        raise ValidationError("manifold tracing requires 0 < V < a")
    eqs, status = equilibria(p)
    saddles = [e for e in eqs if e.kind == "saddle"]
    if len(saddles) < 2:
        raise ValidationError(f"expected two wall saddles, classification: {status}")
    lower = min(saddles, key=lambda e: e.point[1])
    upper = max(saddles, key=lambda e: e.point[1])
    curves = {}
    for eq, want_stable, direction in ((upper, True, -1), (lower, False, +1)):
        J = _reduced_jacobian(np.array(eq.point), p)
        w, vecs = np.linalg.eig(J)
        idx = int(np.argmin(np.real(w))) if want_stable else int(np.argmax(np.real(w)))
        if abs(np.imag(w[idx])) > 1e-9:
            raise ValidationError("degenerate (non-saddle) eigenvector")
        v = np.real(vecs[:, idx])
        v /= np.linalg.norm(v)
        plus = _integrate_until_box_exit(np.array(eq.point) + delta * v, p, direction, box)
        minus = _integrate_until_box_exit(np.array(eq.point) - delta * v, p, direction, box)
        curves["stable" if want_stable else "unstable"] = np.vstack([minus[::-1], plus])
    return curves["stable"], curves["unstable"]


def particle_spec(p: ParticleParams) -> SlowFastSpec:
    """The cellular-flow model in canonical slow-fast form.

    Slow block: x' = v (A = 0, f(x, y) = y).  Fast block: B = -I with
    g(x, y) the flow-plus-settling velocity (independent of y).
    """

    def f(x, y):
        return np.asarray(y, dtype=float)

    def g(x, y):
        x = np.asarray(x, dtype=float)
        return flow_velocity(x, p)

    def f_jac(x, y):
        x = np.asarray(x, dtype=float)
        shape = x.shape[:-1]
        return (
            np.zeros(shape + (2, 2)),
            np.broadcast_to(np.eye(2), shape + (2, 2)).copy(),
        )

    def g_jac(x, y):
        x = np.asarray(x, dtype=float)
        s1, c1 = np.sin(x[..., 0]), np.cos(x[..., 0])
        s2, c2 = np.sin(x[..., 1]), np.cos(x[..., 1])
        gx = p.a * np.stack(
            [
                np.stack([c1 * c2, -s1 * s2], axis=-1),
                np.stack([s1 * s2, -c1 * c2], axis=-1),
            ],
            axis=-2,
        )
        return gx, np.zeros(x.shape[:-1] + (2, 2))

    return SlowFastSpec(
        A=np.zeros((2, 2)),
        B=-np.eye(2),
        f=f,
        g=g,
        epsilon=p.epsilon,
        sigma=p.sigma,
        n=2,
        m=2,
        f_jac=f_jac,
        g_jac=g_jac,
        name="cellular-flow",
    )


def advisory_constants(p: ParticleParams):
    """(K, alpha, beta, L_f, L_g) used by the assumption check.

    B = -I gives K = 1, alpha = 0, beta = 1 exactly.  L_g is the
    sqrt(2)*a Frobenius bound on the flow Jacobian: conservative (the
    Euclidean-spectral supremum is a) but matches the max-norm pairing
    used for sampled estimates, so the advisory check errs safe.
    """
    return 1.0, 0.0, 1.0, 1.0, math.sqrt(2.0) * p.a
