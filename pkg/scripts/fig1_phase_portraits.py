#!/usr/bin/env python3
"""Phase portraits of the reduced flow in one cell without settling.

Two panels: epsilon = 0 gives nested closed streamlines around the cell
center; epsilon = 0.05 adds the inertial correction and the same starts
spiral outward until they leave the cell.
"""

import sys

import numpy as np

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))
from _common import PI, make_parser, resolve_out, write_recipe

from slowfast.integrators import IntegratorConfig, integrate_reduced
from slowfast.particle import ParticleParams


def main() -> None:
    args = make_parser(__doc__).parse_args()
    out = resolve_out(args, "fig1_phase_portraits")

    t_max = 8.0 if args.quick else 60.0
    starts = [(PI / 2 + r, PI / 2) for r in (0.3, 0.6, 0.9, 1.2)]
    for tag, eps in (("eps0", 0.0), ("eps005", 0.05)):
        p = ParticleParams(a=0.7, V=0.0, epsilon=eps, sigma=0.0)
        cfg = IntegratorConfig(dt=1e-3, t_max=t_max, record_every=20)
        series = []
        for k, x0 in enumerate(starts):
            traj = integrate_reduced(np.array(x0), p, None, cfg)
            path = out / f"orbit_{tag}_{k}.csv"
            traj.to_csv(path, labels=["xi1", "xi2"])
            series.append({"path": path.name, "columns": ["xi1", "xi2"]})
        write_recipe(out, f"phase_{tag}", {
            "kind": "phase",
            "title": f"reduced flow, V=0, epsilon={eps}",
            "series": series,
        })


if __name__ == "__main__":
    main()
