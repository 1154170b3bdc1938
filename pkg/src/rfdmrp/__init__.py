"""WSN data-collection simulator: gradient multi-hop routing with cluster baselines."""

from .config import PROTOCOLS, SimConfig
from .simulator import (
    LifetimeSummary,
    RoundMetrics,
    SimulationResult,
    compare_protocols,
    run_simulation,
    sweep_density,
    sweep_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "PROTOCOLS",
    "SimConfig",
    "LifetimeSummary",
    "RoundMetrics",
    "SimulationResult",
    "compare_protocols",
    "run_simulation",
    "sweep_density",
    "sweep_gamma",
    "__version__",
]
