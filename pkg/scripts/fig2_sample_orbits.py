#!/usr/bin/env python3
"""Single sample orbits under strong settling (V = 0.3).

Three variants from the same start: the inertia-free flow (epsilon = 0),
the inertial reduction (epsilon = 0.05), and the inertial reduction with
frozen noise (sigma = 0.01).  All three sink out through the cell bottom;
inertia and noise shift where and when.
"""

import sys

import numpy as np

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))
from _common import make_parser, resolve_out, write_recipe

from slowfast.integrators import IntegratorConfig, integrate_reduced
from slowfast.noise import NoiseRealization
from slowfast.particle import ParticleParams


def main() -> None:
    args = make_parser(__doc__).parse_args()
    out = resolve_out(args, "fig2_sample_orbits")

    t_max = 10.0 if args.quick else 100.0
    dt = 1e-3
    start = np.array([1.2, 0.9])
    variants = [
        ("inviscid", 0.0, 0.0),
        ("inertial", 0.05, 0.0),
        ("inertial_noisy", 0.05, 0.01),
    ]
    series = []
    for tag, eps, sigma in variants:
        p = ParticleParams(a=0.7, V=0.3, epsilon=eps, sigma=sigma)
        cfg = IntegratorConfig(dt=dt, t_max=t_max, record_every=10)
        noise = None
        if sigma > 0:
            noise = NoiseRealization(master_seed=0, dt=dt, t_min=-dt, t_max=t_max + dt)
        traj = integrate_reduced(start, p, noise, cfg, mode="frozen")
        path = out / f"orbit_{tag}.csv"
        traj.to_csv(path, labels=["xi1", "xi2"])
        series.append({"path": path.name, "columns": ["xi1", "xi2"], "label": tag})
    write_recipe(out, "sample_orbits", {
        "kind": "phase",
        "title": "sample orbits, V=0.3",
        "series": series,
    })


if __name__ == "__main__":
    main()
