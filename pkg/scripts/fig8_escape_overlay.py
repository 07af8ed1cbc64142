#!/usr/bin/env python3
"""Left-exit probability overlaid with the saddle manifolds (V = 0.1).

The support of the left-exit probability concentrates along the
stable/unstable manifolds of the wall saddles; this panel superimposes
the traced curves on the Monte Carlo map.
"""

import sys

import numpy as np

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))
from _common import decimate, grid_size, make_parser, path_count, resolve_out, write_recipe

from slowfast.integrators import IntegratorConfig
from slowfast.montecarlo import GridSpec, escape_probability_map
from slowfast.particle import ParticleParams, trace_manifolds


def main() -> None:
    args = make_parser(__doc__).parse_args()
    out = resolve_out(args, "fig8_escape_overlay")

    p = ParticleParams(a=0.7, V=0.1, epsilon=0.05, sigma=0.01)
    curves = []
    for name, curve in zip(("stable", "unstable"), trace_manifolds(p)):
        path = out / f"manifold_{name}.csv"
        np.savetxt(path, decimate(curve), delimiter=",", header="xi1,xi2", comments="")
        curves.append({"path": path.name, "label": name})

    n1, n2 = grid_size(args, full=64)
    paths = path_count(args, full=1000)
    threshold = 50.0 if args.quick else 1000.0
    cfg = IntegratorConfig(dt=5e-3, t_max=threshold)
    grid = GridSpec(n1=n1, n2=n2, paths_per_point=paths,
                    threshold=threshold, master_seed=0)
    result = escape_probability_map(grid, p, cfg, side="left", mode="frozen",
                                    workers=args.workers)
    csv_path, _ = result.write(out / "escape_prob_left.csv")
    write_recipe(out, "escape_overlay", {
        "kind": "overlay",
        "title": "P(exit through left) with saddle manifolds, V=0.1",
        "grid": {"path": csv_path.name, "n1": n1, "n2": n2},
        "curves": curves,
        "scale": {"type": "linear", "min": 0.0, "max": 1.0},
    })


if __name__ == "__main__":
    main()
