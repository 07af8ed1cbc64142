#!/usr/bin/env python3
"""Per-side escape probability maps with moderate settling (V = 0.1).

Same four panels as the V = 0 study, but settling breaks the symmetry:
bottom exits dominate, exits through the right side are strongly
suppressed, and the left-exit support organizes along the deterministic
manifold structure.
"""

import sys

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))
from _common import grid_size, make_parser, path_count, resolve_out, write_recipe

from slowfast.integrators import IntegratorConfig
from slowfast.montecarlo import GridSpec, escape_probability_map, run_grid_paths
from slowfast.particle import SIDES, ParticleParams


def main() -> None:
    args = make_parser(__doc__).parse_args()
    out = resolve_out(args, "fig5_escape_prob_v01")

    n1, n2 = grid_size(args, full=64)
    paths = path_count(args, full=1000)
    threshold = 50.0 if args.quick else 1000.0
    cfg = IntegratorConfig(dt=5e-3, t_max=threshold)
    p = ParticleParams(a=0.7, V=0.1, epsilon=0.05, sigma=0.01)
    grid = GridSpec(n1=n1, n2=n2, paths_per_point=paths,
                    threshold=threshold, master_seed=0)
    raw = run_grid_paths(grid, p, cfg, mode="frozen", workers=args.workers)
    for side in SIDES:
        result = escape_probability_map(grid, p, cfg, side=side, mode="frozen", _raw=raw)
        csv_path, _ = result.write(out / f"escape_prob_{side}.csv")
        write_recipe(out, f"escape_prob_{side}", {
            "kind": "heatmap",
            "title": f"P(exit through {side}), V=0.1",
            "grid": {"path": csv_path.name, "n1": n1, "n2": n2},
            "scale": {"type": "linear", "min": 0.0, "max": 1.0},
        })


if __name__ == "__main__":
    main()
