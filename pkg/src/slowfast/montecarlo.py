"""Grid studies over initial conditions: exit times, escape
probabilities, settling-time differences.

A study places particles on an (n1 x n2) lattice over the closed cell
[0, pi]^2 (boundary included), integrates N reduced paths per lattice
point, and aggregates per-cell statistics.  Path (gi, pi) draws all of
its randomness from the stream keyed by (grid index gi, path index
pi), so any partition of the work across processes yields the same
numbers, cell for cell, bit for bit.

Results are written as a CSV (one row per lattice point) plus a JSON
sidecar with the full study configuration; see FORMATS.md.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import kernels, rng
from .integrators import IntegratorConfig
from .noise import FrozenIntegrals
from .particle import SIDE_CODES, SIDES, ParticleParams
from .systems import ValidationError

_FROZEN_COUNTER = np.uint64(1 << 62)  # matches NoiseRealization's index bias

CSV_COLUMNS = [
    "xi1",
    "xi2",
    "value",
    "se",
    "n_left",
    "n_right",
    "n_top",
    "n_bottom",
    "n_censored",
    "n_failed",
]


@dataclass(frozen=True)
class GridSpec:
    n1: int = 64
    n2: int = 64
    paths_per_point: int = 1000
    threshold: float = 1000.0
    master_seed: int = 0

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValidationError("lattice needs at least 2 points per axis")
        if self.paths_per_point < 1:
            raise ValidationError("paths_per_point must be >= 1")
        if self.threshold <= 0:
            raise ValidationError("threshold time must be positive")

    @property
    def n_points(self) -> int:
        return self.n1 * self.n2

    def lattice(self):
        """Flattened lattice (xi1, xi2, interior mask); index i1*n2 + i2."""
        x1 = np.linspace(0.0, math.pi, self.n1)
        x2 = np.linspace(0.0, math.pi, self.n2)
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        xi1 = X1.ravel()
        xi2 = X2.ravel()
        interior = (xi1 > 0) & (xi1 < math.pi) & (xi2 > 0) & (xi2 < math.pi)
        return xi1, xi2, interior


@dataclass(frozen=True)
class GridStudyResult:
    kind: str
    grid: GridSpec
    params: ParticleParams
    cfg: IntegratorConfig
    mode: str
    xi1: np.ndarray
    xi2: np.ndarray
    values: np.ndarray
    se: np.ndarray
    side_counts: np.ndarray  # (n_points, 4) in SIDES order
    censored: np.ndarray
    failed: np.ndarray
    extra: dict = field(default_factory=dict)

    def values_grid(self):
        return self.values.reshape(self.grid.n1, self.grid.n2)

    def interior_mask(self):
        return self.grid.lattice()[2]

    def metadata(self) -> dict:
        return {
            "kind": self.kind,
            "params": {
                "a": self.params.a,
                "V": self.params.V,
                "epsilon": self.params.epsilon,
                "sigma": self.params.sigma,
            },
            "grid": {
                "n1": self.grid.n1,
                "n2": self.grid.n2,
                "paths_per_point": self.grid.paths_per_point,
                "threshold": self.grid.threshold,
                "master_seed": self.grid.master_seed,
            },
            "integrator": {
                "dt": self.cfg.dt,
                "scheme": self.cfg.scheme,
            },
            "mode": self.mode,
            "columns": CSV_COLUMNS,
            "extra": self.extra,
        }

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for i in range(self.grid.n_points):
                w.writerow(
                    [
                        f"{self.xi1[i]:.12g}",
                        f"{self.xi2[i]:.12g}",
                        f"{self.values[i]:.12g}",
                        f"{self.se[i]:.12g}",
                        int(self.side_counts[i, 0]),
                        int(self.side_counts[i, 1]),
                        int(self.side_counts[i, 2]),
                        int(self.side_counts[i, 3]),
                        int(self.censored[i]),
                        int(self.failed[i]),
                    ]
                )

    def write(self, csv_path):
        """CSV plus a JSON sidecar next to it (same stem)."""
        self.to_csv(csv_path)
        side = str(csv_path)
        side = side[: side.rfind(".")] if side.endswith(".csv") else side
        with open(side + ".json", "w") as fh:
            json.dump(self.metadata(), fh, indent=2, sort_keys=True)
        return csv_path, side + ".json"


def load_grid_csv(path):
    """Read a study CSV back into flat numpy columns."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != CSV_COLUMNS:
            raise ValidationError(f"unexpected CSV columns: {header}")
        rows = np.array([[float(v) for v in row] for row in r])
    return {name: rows[:, j] for j, name in enumerate(CSV_COLUMNS)}


def _frozen_constants(master_seed, gi, pi):
    """Per-path (I_e1, I_e2, I_se1, I_se2), identical to the draws a
    NoiseRealization with stream_id=(gi, pi) would produce."""
    keys = (gi.astype(np.uint64) << np.uint64(32)) | pi.astype(np.uint64)
    blocks = np.full(gi.shape, _FROZEN_COUNTER, dtype=np.uint64)
    z = rng.normals(np.uint64(master_seed), keys, blocks, rng.PURPOSE_FROZEN)
    l11 = math.sqrt(FrozenIntegrals.VAR_IE)
    l21 = FrozenIntegrals.COV / l11
    l22 = math.sqrt(FrozenIntegrals.VAR_ISE - l21 * l21)
    e1 = l11 * z[:, 0]
    z1 = l21 * z[:, 0] + l22 * z[:, 1]
    e2 = l11 * z[:, 2]
    z2 = l21 * z[:, 2] + l22 * z[:, 3]
    return e1, e2, z1, z2


def _run_chunk(args):
    grid, p, cfg, mode, gis = args
    xi1, xi2, _ = grid.lattice()
    N = grid.paths_per_point
    gi_rep = np.repeat(gis, N)
    pi_rep = np.tile(np.arange(N, dtype=np.uint64), len(gis))
    x0s = np.repeat(xi1[gis], N)
    y0s = np.repeat(xi2[gis], N)
    n = x0s.size
    times = np.empty(n)
    sides = np.empty(n, dtype=np.int64)
    if p.sigma > 0:
        e1, e2, z1, z2 = _frozen_constants(grid.master_seed, gi_rep, pi_rep)
    else:
        e1 = e2 = z1 = z2 = np.zeros(n)
    if mode == "frozen":
        kernels.reduced_frozen_exit_batch(
            x0s, y0s, e1, e2, z1, z2,
            p.a, p.V, p.epsilon, p.sigma, cfg.dt, grid.threshold, times, sides,
        )
    elif mode == "evolving":
        keys = (gi_rep.astype(np.uint64) << np.uint64(32)) | pi_rep.astype(np.uint64)
        kernels.reduced_evolving_exit_batch(
            x0s, y0s, e1, e2, z1, z2,
            np.uint64(grid.master_seed), keys,
            p.a, p.V, p.epsilon, p.sigma, cfg.dt, grid.threshold, times, sides,
        )
    else:
        raise ValidationError(f"unknown noise mode {mode!r}")
    return times.reshape(len(gis), N), sides.reshape(len(gis), N)


def run_grid_paths(grid: GridSpec, p: ParticleParams, cfg: IntegratorConfig,
                   mode="frozen", workers=1):
    """Exit times and sides for every (lattice point, path) pair.

    Returns (times, sides) of shape (n_points, N); boundary lattice
    points exit immediately through their own side.  ``workers`` only
    partitions the work; results are identical for any count.
    """
    xi1, xi2, interior = grid.lattice()
    N = grid.paths_per_point
    times = np.zeros((grid.n_points, N))
    sides = np.empty((grid.n_points, N), dtype=np.int64)
    for i in np.flatnonzero(~interior):
        if xi1[i] <= 0.0:
            code = SIDE_CODES["left"]
        elif xi2[i] <= 0.0:
            code = SIDE_CODES["top"]
        elif xi1[i] >= math.pi:
            code = SIDE_CODES["right"]
        else:
            code = SIDE_CODES["bottom"]
        sides[i, :] = code
    gis = np.flatnonzero(interior)
    if gis.size == 0:
        return times, sides
    n_chunks = max(1, min(int(workers), gis.size))
    chunks = np.array_split(gis, n_chunks)
    jobs = [(grid, p, cfg, mode, c) for c in chunks if c.size]
    if n_chunks == 1:
        results = [_run_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=n_chunks) as ex:
            results = list(ex.map(_run_chunk, jobs))
    for job, (t, s) in zip(jobs, results):
        times[job[4]] = t
        sides[job[4]] = s
    return times, sides


def _aggregate(grid, times, sides):
    side_counts = np.stack(
        [(sides == SIDE_CODES[s]).sum(axis=1) for s in SIDES], axis=1
    )
    censored = (sides == kernels.SIDE_CENSORED).sum(axis=1)
    failed = (~np.isfinite(times)).sum(axis=1)
    return side_counts, censored, failed


def first_exit_time_map(grid: GridSpec, p: ParticleParams,
                        cfg: Optional[IntegratorConfig] = None,
                        mode="frozen", workers=1) -> GridStudyResult:
    """Per-cell mean first exit time, censored at the threshold."""
    cfg = cfg or IntegratorConfig()
    xi1, xi2, _ = grid.lattice()
    times, sides = run_grid_paths(grid, p, cfg, mode, workers)
    side_counts, censored, failed = _aggregate(grid, times, sides)
    N = grid.paths_per_point
    values = times.mean(axis=1)
    se = times.std(axis=1, ddof=1) / math.sqrt(N) if N > 1 else np.zeros(grid.n_points)
    return GridStudyResult(
        kind="exit-time", grid=grid, params=p, cfg=cfg, mode=mode,
        xi1=xi1, xi2=xi2, values=values, se=se,
        side_counts=side_counts, censored=censored, failed=failed,
    )


def escape_probability_map(grid: GridSpec, p: ParticleParams,
                           cfg: Optional[IntegratorConfig] = None,
                           side="left", mode="frozen", workers=1,
                           _raw=None) -> GridStudyResult:
    """Per-cell M/N escape probability through one side.

    ``_raw`` may carry precomputed (times, sides) from run_grid_paths
    so the four side maps can share one simulation.
    """
    if side not in SIDE_CODES:
        raise ValidationError(f"unknown side {side!r}")
    cfg = cfg or IntegratorConfig()
    xi1, xi2, _ = grid.lattice()
    times, sides = _raw if _raw is not None else run_grid_paths(grid, p, cfg, mode, workers)
    side_counts, censored, failed = _aggregate(grid, times, sides)
    N = grid.paths_per_point
    values = side_counts[:, SIDE_CODES[side]] / N
    se = np.sqrt(values * (1.0 - values) / N)
    return GridStudyResult(
        kind="escape-probability", grid=grid, params=p, cfg=cfg, mode=mode,
        xi1=xi1, xi2=xi2, values=values, se=se,
        side_counts=side_counts, censored=censored, failed=failed,
        extra={"side": side},
    )


def settling_time_difference_map(grid: GridSpec, p: ParticleParams, sigma: float,
                                 cfg: Optional[IntegratorConfig] = None,
                                 mode="frozen", workers=1,
                                 settle_only=True) -> GridStudyResult:
    """Per-cell (deterministic settling time) - (mean stochastic one).

    Sign convention: noise-delayed settling gives negative values.
    Stochastic paths that exit through a side other than the bottom are
    excluded from the average (``settle_only``); with the flag off they
    count as never settling, which the threshold censors to T (the same
    rule that censors exit times).  Cells whose deterministic path
    fails to settle before the threshold are NaN.
    """
    if p.epsilon <= 0 or p.V <= 0:
        raise ValidationError("settling comparison requires epsilon > 0 and V > 0")
    cfg = cfg or IntegratorConfig()
    xi1, xi2, interior = grid.lattice()
    bottom = SIDE_CODES["bottom"]

    det = replace(p, sigma=0.0)
    det_grid = replace(grid, paths_per_point=1)
    t_det, s_det = run_grid_paths(det_grid, det, cfg, mode, workers)
    t_det = t_det[:, 0]
    det_settles = s_det[:, 0] == bottom

    sto = replace(p, sigma=sigma)
    times, sides = run_grid_paths(grid, sto, cfg, mode, workers)
    side_counts, censored, failed = _aggregate(grid, times, sides)
    settle = sides == bottom
    n_settle = settle.sum(axis=1)
    if settle_only:
        with np.errstate(invalid="ignore", divide="ignore"):
            mean_sto = np.where(settle, times, 0.0).sum(axis=1) / n_settle
            var_sto = np.where(settle, (times - mean_sto[:, None]) ** 2, 0.0).sum(axis=1)
            se = np.sqrt(var_sto / np.maximum(n_settle - 1, 1)) / np.sqrt(
                np.maximum(n_settle, 1)
            )
    else:
        t_cens = np.where(settle, times, grid.threshold)
        mean_sto = t_cens.mean(axis=1)
        N = grid.paths_per_point
        se = (
            t_cens.std(axis=1, ddof=1) / math.sqrt(N) if N > 1 else np.zeros(grid.n_points)
        )
    values = t_det - mean_sto
    values = np.where(det_settles, values, np.nan)
    values = np.where(interior, values, 0.0)  # boundary cells exit at t=0 both ways
    se = np.where(interior & det_settles & (n_settle > 0), se, 0.0)
    return GridStudyResult(
        kind="settling-difference", grid=grid, params=sto, cfg=cfg, mode=mode,
        xi1=xi1, xi2=xi2, values=values, se=se,
        side_counts=side_counts, censored=censored, failed=failed,
        extra={
            "sigma": sigma,
            "settle_only": settle_only,
            "det_nonsettling_cells": int(np.sum(interior & ~det_settles)),
            "nonsettling_fraction_mean": float(
                1.0 - n_settle[interior].mean() / grid.paths_per_point
            ),
        },
    )


@dataclass(frozen=True)
class CellAverage:
    value: float
    se: float
    n_cells: int
    n_excluded: int
    n_censored_paths: int


def average_over_cell(result: GridStudyResult) -> CellAverage:
    """Arithmetic mean of the map over interior lattice cells.

    Cells without a finite value (flagged / censored-deterministic) are
    excluded and counted; the SE aggregates per-cell variances.
    """
    interior = result.interior_mask()
    if not np.any(interior):
        raise ValidationError("no interior cells to average")
    vals = result.values[interior]
    ses = result.se[interior]
    ok = np.isfinite(vals)
    if not np.any(ok):
        raise ValidationError("all interior cells excluded")
    n = int(ok.sum())
    return CellAverage(
        value=float(vals[ok].mean()),
        se=float(np.sqrt(np.sum(ses[ok] ** 2)) / n),
        n_cells=n,
        n_excluded=int((~ok).sum()),
        n_censored_paths=int(result.censored[interior].sum()),
    )


def polyline_distance(points, curve, max_segments=4000):
    """Euclidean distance from each point to a polyline (min over segments)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    curve = np.asarray(curve, dtype=float)
    if len(curve) < 2:
        return np.linalg.norm(points - curve.reshape(1, 2), axis=1)
    stride = max(1, (len(curve) - 1) // max_segments)
    c = curve[::stride]
    if not np.array_equal(c[-1], curve[-1]):
        c = np.vstack([c, curve[-1]])
    a = c[:-1]
    d = c[1:] - a
    len2 = np.einsum("sj,sj->s", d, d)
    len2 = np.where(len2 == 0, 1.0, len2)
    w = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("psj,sj->ps", w, d) / len2, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.linalg.norm(points[:, None, :] - proj, axis=2)
    return dist.min(axis=1)


@dataclass(frozen=True)
class ManifoldCorrelation:
    n_support: int
    fraction_within: float
    d0: float
    threshold: float
    mean_distance: float
    max_distance: float


def manifold_correlation(result: GridStudyResult, curve,
                         threshold=0.5, d0=0.3) -> ManifoldCorrelation:
    """How tightly the high-escape-probability set hugs a curve.

    Takes interior cells with value > threshold and reports the
    fraction of them within distance d0 of the polyline.  Empty
    support yields a zero-support report, not an error.
    """
    interior = result.interior_mask()
    sel = interior & (result.values > threshold)
    if not np.any(sel):
        return ManifoldCorrelation(0, 0.0, d0, threshold, math.nan, math.nan)
    pts = np.stack([result.xi1[sel], result.xi2[sel]], axis=1)
    dist = polyline_distance(pts, curve)
    return ManifoldCorrelation(
        n_support=int(sel.sum()),
        fraction_within=float(np.mean(dist <= d0)),
        d0=d0,
        threshold=threshold,
        mean_distance=float(dist.mean()),
        max_distance=float(dist.max()),
    )
