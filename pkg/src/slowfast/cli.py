"""Command line interface for the cellular-flow particle studies.

Every subcommand writes its outputs plus a ``manifest.json`` whose
config echo is sufficient to reproduce the run bit for bit.  Options
can come from a YAML config file; explicit flags win over the file,
which wins over defaults.
"""

from __future__ import annotations

import json
import platform
import sys
import time
from dataclasses import replace

import click
import numpy as np
import yaml

from . import __version__
from .integrators import IntegratorConfig, integrate_full, integrate_reduced
from .manifold import QuadratureParams
from .montecarlo import (
    GridSpec,
    average_over_cell,
    escape_probability_map,
    first_exit_time_map,
    run_grid_paths,
    settling_time_difference_map,
)
from .noise import NoiseRealization
from .particle import SIDES, ParticleParams, advisory_constants, particle_spec, trace_manifolds
from .systems import ValidationError, check_assumptions


def _parse_grid(value):
    if value is None:
        return None
    s = str(value).lower().replace("x", " ").split()
    if len(s) == 1:
        n = int(s[0])
        return n, n
    if len(s) == 2:
        return int(s[0]), int(s[1])
    raise click.BadParameter("grid must be N or N1xN2")


_OPTION_DEFAULTS = {
    "a": 0.7,
    "v": 0.1,
    "epsilon": 0.05,
    "sigma": 0.01,
    "seed": 0,
    "dt": 1e-3,
    "grid": "64x64",
    "paths": 1000,
    "threshold": 1000.0,
    "mode": "frozen",
    "out": "out",
    "workers": 1,
}


def common_options(f):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                     help="YAML config file; flags override its values."),
        click.option("--a", type=float, default=None, help="Flow velocity scale."),
        click.option("--v", "--settling-velocity", "v", type=float, default=None,
                     help="Settling velocity V in still fluid."),
        click.option("--epsilon", type=float, default=None, help="Particle response time."),
        click.option("--sigma", type=float, default=None, help="Noise intensity."),
        click.option("--seed", type=int, default=None, help="Master seed."),
        click.option("--dt", type=float, default=None, help="Integration step."),
        click.option("--grid", type=str, default=None, help="Lattice size, N or N1xN2."),
        click.option("--paths", type=int, default=None, help="Paths per lattice point."),
        click.option("--threshold", type=float, default=None,
                     help="Threshold (censoring) time T."),
        click.option("--mode", type=click.Choice(["frozen", "evolving"]), default=None,
                     help="Noise mode for the reduced system."),
        click.option("--out", type=click.Path(), default=None, help="Output directory."),
        click.option("--workers", type=int, default=None, help="Worker process count."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _resolve(config_path, **flags):
    """Merge defaults < config file < explicit flags."""
    cfg = dict(_OPTION_DEFAULTS)
    if config_path:
        with open(config_path) as fh:
            loaded = yaml.safe_load(fh) or {}
        for k, val in loaded.items():
            key = k.lower()
            if key not in cfg:
                raise click.BadParameter(f"unknown config key {k!r}", param_hint="--config")
            cfg[key] = val
    for k, val in flags.items():
        if val is not None:
            cfg[k] = val
    cfg["grid"] = _parse_grid(cfg["grid"])
    return cfg


def _params(cfg) -> ParticleParams:
    return ParticleParams(a=cfg["a"], V=cfg["v"], epsilon=cfg["epsilon"], sigma=cfg["sigma"])


def _gridspec(cfg) -> GridSpec:
    n1, n2 = cfg["grid"]
    return GridSpec(n1=n1, n2=n2, paths_per_point=cfg["paths"],
                    threshold=cfg["threshold"], master_seed=cfg["seed"])


def _intcfg(cfg) -> IntegratorConfig:
    return IntegratorConfig(dt=cfg["dt"], t_max=cfg["threshold"])


def _write_manifest(out_dir, command, cfg, outputs, t_start, extra=None):
    manifest = {
        "command": command,
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items()},
        "outputs": [str(p) for p in outputs],
        "versions": {
            "package": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "wall_time_s": round(time.time() - t_start, 3),
    }
    if extra:
        manifest.update(extra)
    path = out_dir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def _ensure_out(cfg):
    import pathlib

    out = pathlib.Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
@click.version_option(__version__)
def main():
    """Slow-manifold reduction studies for inertial particles in a cellular flow."""


@main.command()
@common_options
def check(config_path, **flags):
    """Validate the slow-fast structure conditions for the given parameters."""
    cfg = _resolve(config_path, **flags)
    p = _params(cfg)
    spec = particle_spec(p)
    K, alpha, beta, L_f, L_g = advisory_constants(p)
    report = check_assumptions(spec, K, alpha, beta, L_f, L_g)
    click.echo(f"model: {spec.name}  (a={p.a}, V={p.V}, epsilon={p.epsilon}, sigma={p.sigma})")
    click.echo(f"dichotomy constants: K={report.K}, alpha={report.alpha}, beta={report.beta}")
    click.echo(f"Lipschitz constants: L_f={report.L_f}, L_g={report.L_g:.6f}")
    click.echo(f"spectral gap beta > K*L_g: {'satisfied' if report.h2_satisfied else 'VIOLATED'}")
    if report.h2_satisfied:
        click.echo(f"epsilon* = {report.epsilon_star:.6f}"
                   f"  (epsilon={p.epsilon} {'<' if p.epsilon < report.epsilon_star else '>='} epsilon*)")
        click.echo(f"contraction factor at epsilon: {report.contraction_rho(p.epsilon):.6f}")
    sys.exit(0 if report.h2_satisfied else 1)


@main.command()
@common_options
@click.option("--system", type=click.Choice(["full", "reduced"]), default="reduced",
              help="Integrate the 4-D system or the 2-D reduction.")
@click.option("--init", default="1.0,1.0", help="Initial state, comma separated.")
@click.option("--t-max", type=float, default=100.0, help="Integration horizon.")
@click.option("--record-every", type=int, default=10, help="Record every k-th step.")
def simulate(config_path, system, init, t_max, record_every, **flags):
    """Integrate one sample path and write it as a trajectory CSV."""
    t_start = time.time()
    cfg = _resolve(config_path, **flags)
    p = _params(cfg)
    out = _ensure_out(cfg)
    icfg = IntegratorConfig(dt=cfg["dt"], t_max=t_max, record_every=record_every)
    x0 = np.array([float(s) for s in init.split(",")])
    noise = None
    if p.sigma > 0:
        noise = NoiseRealization(master_seed=cfg["seed"], dt=cfg["dt"],
                                 t_min=-cfg["dt"], t_max=t_max + cfg["dt"])
    try:
        if system == "full":
            if x0.size == 2:
                from .particle import flow_velocity

                x0 = np.concatenate([x0, flow_velocity(x0, p)])
            traj = integrate_full(x0, p, noise, icfg)
            labels = ["y1", "y2", "v1", "v2"]
        else:
            traj = integrate_reduced(x0, p, noise, icfg, mode=cfg["mode"])
            labels = ["xi1", "xi2"]
    except ValidationError as e:
        raise click.ClickException(str(e))
    path = out / f"trajectory_{system}.csv"
    traj.to_csv(path, labels=labels)
    _write_manifest(out, "simulate", {**cfg, "system": system, "init": init, "t_max": t_max},
                    [path], t_start)
    click.echo(f"wrote {path}")


@main.command("exit-times")
@common_options
def exit_times(config_path, **flags):
    """First-exit-time map over the lattice (CSV + JSON sidecar)."""
    t_start = time.time()
    cfg = _resolve(config_path, **flags)
    out = _ensure_out(cfg)
    try:
        result = first_exit_time_map(_gridspec(cfg), _params(cfg), _intcfg(cfg),
                                     mode=cfg["mode"], workers=cfg["workers"])
    except ValidationError as e:
        raise click.ClickException(str(e))
    files = result.write(out / "exit_times.csv")
    _write_manifest(out, "exit-times", cfg, files, t_start)
    click.echo(f"wrote {files[0]}")


@main.command("escape-prob")
@common_options
@click.option("--side", type=click.Choice(list(SIDES) + ["all"]), default="all",
              help="Boundary side, or all four.")
def escape_prob(config_path, side, **flags):
    """Per-side escape probability maps (one CSV per side)."""
    t_start = time.time()
    cfg = _resolve(config_path, **flags)
    out = _ensure_out(cfg)
    grid, p, icfg = _gridspec(cfg), _params(cfg), _intcfg(cfg)
    sides = list(SIDES) if side == "all" else [side]
    try:
        raw = run_grid_paths(grid, p, icfg, mode=cfg["mode"], workers=cfg["workers"])
        files = []
        for s in sides:
            result = escape_probability_map(grid, p, icfg, side=s, mode=cfg["mode"], _raw=raw)
            files.extend(result.write(out / f"escape_prob_{s}.csv"))
    except ValidationError as e:
        raise click.ClickException(str(e))
    _write_manifest(out, "escape-prob", {**cfg, "side": side}, files, t_start)
    click.echo(f"wrote {len(files)} files to {out}")


@main.command("settle-diff")
@common_options
@click.option("--settle-only/--all-paths", default=True,
              help="Average stochastic settling over bottom-exit paths only, "
                   "or count non-settling paths at the threshold time.")
def settle_diff(config_path, settle_only, **flags):
    """Settling-time difference map, deterministic minus stochastic mean."""
    t_start = time.time()
    cfg = _resolve(config_path, **flags)
    out = _ensure_out(cfg)
    try:
        result = settling_time_difference_map(
            _gridspec(cfg), _params(cfg), cfg["sigma"], _intcfg(cfg),
            mode=cfg["mode"], workers=cfg["workers"], settle_only=settle_only,
        )
        avg = average_over_cell(result)
    except ValidationError as e:
        raise click.ClickException(str(e))
    files = result.write(out / "settle_diff.csv")
    _write_manifest(out, "settle-diff", {**cfg, "settle_only": settle_only}, files, t_start,
                    extra={"cell_average": {"value": avg.value, "se": avg.se,
                                            "n_cells": avg.n_cells,
                                            "n_excluded": avg.n_excluded}})
    click.echo(f"wrote {files[0]}")
    click.echo(f"cell-averaged difference: {avg.value:+.6f} (se {avg.se:.6f}, "
               f"{avg.n_cells} cells, {avg.n_excluded} excluded)")


@main.command()
@common_options
def manifolds(config_path, **flags):
    """Stable/unstable manifold polylines of the wall saddles (two CSVs)."""
    t_start = time.time()
    cfg = _resolve(config_path, **flags)
    out = _ensure_out(cfg)
    p = replace(_params(cfg), sigma=0.0)
    try:
        stable, unstable = trace_manifolds(p)
    except ValidationError as e:
        raise click.ClickException(str(e))
    files = []
    for name, curve in (("stable", stable), ("unstable", unstable)):
        path = out / f"manifold_{name}.csv"
        np.savetxt(path, curve, delimiter=",", header="xi1,xi2", comments="")
        files.append(path)
    _write_manifest(out, "manifolds", cfg, files, t_start)
    click.echo(f"wrote {files[0]} and {files[1]}")


if __name__ == "__main__":
    main()
