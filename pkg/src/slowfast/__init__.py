"""Random slow-manifold reduction of slow-fast stochastic systems,
with a full study pipeline for inertial particles settling through a
cellular flow."""

__version__ = "0.1.0"

from .integrators import IntegratorConfig, Trajectory
from .manifold import ManifoldApproximation, QuadratureParams
from .montecarlo import GridSpec, GridStudyResult
from .noise import FrozenIntegrals, NoiseRealization
from .particle import CellDomain, ParticleParams
from .systems import AssumptionReport, SlowFastSpec

__all__ = [
    "AssumptionReport",
    "CellDomain",
    "FrozenIntegrals",
    "GridSpec",
    "GridStudyResult",
    "IntegratorConfig",
    "ManifoldApproximation",
    "NoiseRealization",
    "ParticleParams",
    "QuadratureParams",
    "SlowFastSpec",
    "Trajectory",
    "__version__",
]
