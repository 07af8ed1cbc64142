#!/usr/bin/env python3
"""Stable and unstable manifolds of the wall saddles (V = 0.1).

Traces the stable manifold of the upper saddle and the unstable
manifold of the lower saddle of the deterministic reduced system, and
draws them together with the three equilibria.
"""

import sys

import numpy as np

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))
from _common import decimate, make_parser, resolve_out, write_recipe

from slowfast.particle import ParticleParams, equilibria, trace_manifolds


def main() -> None:
    args = make_parser(__doc__).parse_args()
    out = resolve_out(args, "fig7_manifolds")

    p = ParticleParams(a=0.7, V=0.1, epsilon=0.05, sigma=0.0)
    stable, unstable = trace_manifolds(p)
    curves = []
    for name, curve in (("stable", stable), ("unstable", unstable)):
        path = out / f"manifold_{name}.csv"
        np.savetxt(path, decimate(curve), delimiter=",", header="xi1,xi2", comments="")
        curves.append({"path": path.name, "label": name})

    eqs, _ = equilibria(p)
    markers = [{"xi1": e.point[0], "xi2": e.point[1], "label": e.kind} for e in eqs]
    write_recipe(out, "manifolds", {
        "kind": "phase",
        "series": [],
        "curves": curves,
        "markers": markers,
        "title": "saddle manifolds, V=0.1, epsilon=0.05",
    })


if __name__ == "__main__":
    main()
