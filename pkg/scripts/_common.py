"""Shared plumbing for the figure-data scripts.

Each script produces the data files for one figure family (trajectory
CSVs, grid-map CSVs, or manifold polylines) plus one JSON "recipe" per
panel.  A recipe references the data files by relative path and tells
the renderer in ``frontend/`` what kind of panel to draw.  Scripts only
write data and recipes; rendering is a separate step.
"""

from __future__ import annotations

import argparse
import json
import math
import pathlib

PI = math.pi


def make_parser(description: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--out", type=pathlib.Path, default=None,
                        help="Output directory (default: out/<script name>).")
    parser.add_argument("--quick", action="store_true",
                        help="Small grids and few paths, for smoke tests and fixtures.")
    parser.add_argument("--grid", type=str, default=None,
                        help="Lattice size N or N1xN2, overrides the default.")
    parser.add_argument("--paths", type=int, default=None,
                        help="Paths per lattice point, overrides the default.")
    parser.add_argument("--workers", type=int, default=1,
                        help="Worker processes for grid studies.")
    return parser


def resolve_out(args, default_name: str) -> pathlib.Path:
    out = args.out if args.out is not None else pathlib.Path("out") / default_name
    out.mkdir(parents=True, exist_ok=True)
    return out


def parse_grid(value: str) -> tuple[int, int]:
    parts = value.lower().split("x")
    if len(parts) == 1:
        return int(parts[0]), int(parts[0])
    if len(parts) == 2:
        return int(parts[0]), int(parts[1])
    raise SystemExit(f"bad grid spec: {value!r}")


def grid_size(args, full: int, quick: int = 9) -> tuple[int, int]:
    if args.grid is not None:
        return parse_grid(args.grid)
    n = quick if args.quick else full
    return n, n


def path_count(args, full: int, quick: int = 8) -> int:
    if args.paths is not None:
        return args.paths
    return quick if args.quick else full


def decimate(curve, max_vertices: int = 2000):
    """Subsample a polyline, always keeping the first and last vertex."""
    n = len(curve)
    if n <= max_vertices:
        return curve
    step = (n - 1) / (max_vertices - 1)
    idx = [round(i * step) for i in range(max_vertices)]
    return curve[idx]


def write_recipe(out_dir: pathlib.Path, name: str, recipe: dict) -> pathlib.Path:
    """Write one renderer recipe; data paths are relative to the recipe."""
    recipe.setdefault("domain", {"xi1": [0.0, PI], "xi2": [0.0, PI]})
    recipe.setdefault("width", 560)
    recipe.setdefault("height", 560)
    path = out_dir / f"{name}.recipe.json"
    with open(path, "w") as fh:
        json.dump(recipe, fh, indent=2, sort_keys=True)
    print(f"wrote {path}")
    return path
