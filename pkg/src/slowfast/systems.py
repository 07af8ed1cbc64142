"""Slow-fast system declarations and standing-assumption checks.

A system is the pair of blocks

    x' = A x + f(x, y)                     (slow, R^n)
    y' = (B y + g(x, y))/eps + noise       (fast, R^m)

with exponential dichotomy constants (K, alpha, beta) for A, B and
Lipschitz constants (L_f, L_g) for the nonlinearities.  The fixed-point
contraction factor

    rho(eps) = 2 K L_f eps / (2 eps alpha + beta - K L_g)
             + 2 K L_g / (K L_g + beta)

is below 1 for small eps exactly when beta > K L_g, which is the
checkable existence condition exposed here.

Nonlinearities are plain callables mapping batched arrays: f(x, y)
accepts x of shape (..., n) and y of shape (..., m).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class SlowFastSpec:
    A: np.ndarray
    B: np.ndarray
    f: Callable
    g: Callable
    epsilon: float
    sigma: float
    n: int
    m: int
    f_jac: Optional[Callable] = None  # returns (f_x, f_y)
    g_jac: Optional[Callable] = None  # returns (g_x, g_y)
    name: str = ""

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.epsilon <= 0:
            raise ValidationError("epsilon must be positive")
        if self.sigma < 0:
            raise ValidationError("sigma must be nonnegative")
        if A.shape != (self.n, self.n) or B.shape != (self.m, self.m):
            raise ValidationError("matrix shapes inconsistent with (n, m)")


@dataclass(frozen=True)
class AssumptionReport:
    K: float
    alpha: float
    beta: float
    L_f: float
    L_g: float
    h2_satisfied: bool
    epsilon_star: float
    lipschitz_estimated: bool = False

    def contraction_rho(self, epsilon: float) -> float:
        return contraction_rho(epsilon, self.K, self.alpha, self.beta, self.L_f, self.L_g)

    def lambda_star(self, epsilon: float) -> float:
        """Decay weight (beta - K L_g)/(2 eps) of the working norm."""
        return (self.beta - self.K * self.L_g) / (2.0 * epsilon)


def contraction_rho(epsilon, K, alpha, beta, L_f, L_g) -> float:
    denom = 2.0 * epsilon * alpha + beta - K * L_g
    if denom <= 0:
        return np.inf
    return 2.0 * K * L_f * epsilon / denom + 2.0 * K * L_g / (K * L_g + beta)


def _epsilon_star(K, alpha, beta, L_f, L_g, tol=1e-12) -> float:
    """Largest eps with rho(eps) < 1, by bisection (inf if unbounded)."""
    if contraction_rho(tol, K, alpha, beta, L_f, L_g) >= 1.0:
        return 0.0
    hi = 1.0
    while contraction_rho(hi, K, alpha, beta, L_f, L_g) < 1.0:
        hi *= 2.0
        if hi > 1e12:
            return np.inf
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if contraction_rho(mid, K, alpha, beta, L_f, L_g) < 1.0:
            lo = mid
        else:
            hi = mid
    return lo


def check_assumptions(
    spec: SlowFastSpec,
    K: float,
    alpha: float,
    beta: float,
    L_f: float,
    L_g: float,
    lipschitz_estimated: bool = False,
) -> AssumptionReport:
    """Populate the dichotomy/contraction report for declared constants.

    A failed spectral-gap condition (beta <= K L_g) is reported, not
    raised; nonpositive constants are an error.
    """
    if K <= 0 or beta <= 0 or L_f < 0 or L_g < 0 or alpha < 0:
        raise ValidationError("constants must satisfy K>0, beta>0, alpha>=0, L>=0")
    h2 = beta > K * L_g
    eps_star = _epsilon_star(K, alpha, beta, L_f, L_g) if h2 else 0.0
    return AssumptionReport(
        K=K,
        alpha=alpha,
        beta=beta,
        L_f=L_f,
        L_g=L_g,
        h2_satisfied=h2,
        epsilon_star=eps_star,
        lipschitz_estimated=lipschitz_estimated,
    )


def default_dichotomy_constants(spec: SlowFastSpec):
    """Numeric fallback (K, alpha, beta) for diagonalizable A and B.

    alpha = max Re eig(A) clamped to >= 0, beta = -max Re eig(B), K =
    the larger eigenvector condition number.  These are valid dichotomy
    constants only when the eigenbases are well conditioned; callers
    supplying analytic constants should prefer those.
    """
    wA, VA = np.linalg.eig(spec.A)
    wB, VB = np.linalg.eig(spec.B)
    alpha = max(0.0, float(np.max(np.real(wA))))
    beta = -float(np.max(np.real(wB)))
    if beta <= 0:
        raise ValidationError("B must be stable for the fallback constants")
    K = max(float(np.linalg.cond(VA)), float(np.linalg.cond(VB)), 1.0)
    return K, alpha, beta


def estimate_lipschitz(
    map_fn: Callable,
    box,
    samples: int = 2000,
    seed: int = 0,
    in_norm=2,
    out_norm=2,
) -> float:
    """Sampled lower bound on the Lipschitz constant of ``map_fn``.

    ``box`` is a sequence of (lo, hi) per input coordinate; the map is
    evaluated on random point pairs (including nearby pairs, which probe
    the local Jacobian) and the max |df|/|dx| ratio is returned.  This
    is a lower bound on the true constant, never a certificate.
    """
    box = np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 1] <= box[:, 0]):
        raise ValidationError("box must be a list of nondegenerate (lo, hi) pairs")
    if samples < 2:
        raise ValidationError("need at least 2 samples")
    rng_ = np.random.default_rng(seed)
    d = box.shape[0]
    lo, hi = box[:, 0], box[:, 1]
    a = rng_.uniform(lo, hi, size=(samples, d))
    # half the pairs are far apart, half are small perturbations
    b = rng_.uniform(lo, hi, size=(samples, d))
    scale = (hi - lo) * 1e-4
    near = a + rng_.uniform(-1, 1, size=(samples, d)) * scale
    b[samples // 2 :] = np.clip(near[samples // 2 :], lo, hi)
    fa = np.asarray(map_fn(a), dtype=float)
    fb = np.asarray(map_fn(b), dtype=float)
    dx = np.linalg.norm(a - b, ord=in_norm, axis=-1)
    df = np.linalg.norm(fa - fb, ord=out_norm, axis=-1)
    ok = dx > 0
    return float(np.max(df[ok] / dx[ok]))


def check_jacobian(fn, jac_fn, points_x, points_y, rel_tol=1e-5, h=1e-6):
    """Central finite-difference consistency check of (fn_x, fn_y).

    Returns the worst relative error over the probe points; raises
    ValidationError when it exceeds ``rel_tol``.
    """
    worst = 0.0
    for x, y in zip(points_x, points_y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        jx, jy = jac_fn(x, y)
        fd_x = np.stack(
            [(fn(x + h * e, y) - fn(x - h * e, y)) / (2 * h) for e in np.eye(len(x))],
            axis=-1,
        )
        fd_y = np.stack(
            [(fn(x, y + h * e) - fn(x, y - h * e)) / (2 * h) for e in np.eye(len(y))],
            axis=-1,
        )
        for analytic, fd in ((jx, fd_x), (jy, fd_y)):
            scale = max(1.0, float(np.max(np.abs(fd))))
            worst = max(worst, float(np.max(np.abs(np.asarray(analytic) - fd))) / scale)
    if worst > rel_tol:
        raise ValidationError(f"jacobian inconsistent with finite differences: {worst:.3e}")
    return worst
