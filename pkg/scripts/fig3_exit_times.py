#!/usr/bin/env python3
"""Mean first-exit-time maps at four settling velocities.

One heatmap per V in {0, 0.1, 0.5, 0.65}: without settling the cell core
traps paths until the censoring threshold; increasing V shrinks the
trapped core until every start leaves quickly through the bottom.
"""

import sys

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))
from _common import grid_size, make_parser, path_count, resolve_out, write_recipe

from slowfast.integrators import IntegratorConfig
from slowfast.montecarlo import GridSpec, first_exit_time_map
from slowfast.particle import ParticleParams


def main() -> None:
    args = make_parser(__doc__).parse_args()
    out = resolve_out(args, "fig3_exit_times")

    n1, n2 = grid_size(args, full=64)
    paths = path_count(args, full=1000)
    threshold = 50.0 if args.quick else 1000.0
    cfg = IntegratorConfig(dt=5e-3, t_max=threshold)
    for v in (0.0, 0.1, 0.5, 0.65):
        tag = f"v{v:g}".replace(".", "")
        p = ParticleParams(a=0.7, V=v, epsilon=0.05, sigma=0.01)
        grid = GridSpec(n1=n1, n2=n2, paths_per_point=paths,
                        threshold=threshold, master_seed=0)
        result = first_exit_time_map(grid, p, cfg, mode="frozen", workers=args.workers)
        csv_path, _ = result.write(out / f"exit_times_{tag}.csv")
        write_recipe(out, f"exit_times_{tag}", {
            "kind": "heatmap",
            "title": f"mean first exit time, V={v}",
            "grid": {"path": csv_path.name, "n1": n1, "n2": n2},
            "scale": {"type": "log"},
        })


if __name__ == "__main__":
    main()
