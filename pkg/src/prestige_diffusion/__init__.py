"""Prestige and the spread of ideas over faculty hiring networks."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    HiringNetwork,
    Institution,
    LoadError,
    decile_density_matrix,
    largest_scc,
    load_network,
    mean_geodesic_length,
    reachable_set,
)
from .prestige import (  # noqa: E402
    PrestigeScores,
    average_prestige,
    count_violations,
    minimize_violations,
    upward_fraction,
)
from .epidemic import (  # noqa: E402
    EpidemicConfig,
    EpidemicOutcome,
    SweepResult,
    mc_summary,
    run_si,
    run_si_jump,
    sweep,
    trial_stream,
)

__all__ = [
    "HiringNetwork", "Institution", "LoadError", "decile_density_matrix", "largest_scc",
    "load_network", "mean_geodesic_length", "reachable_set",
    "PrestigeScores", "average_prestige", "count_violations", "minimize_violations",
    "upward_fraction",
    "EpidemicConfig", "EpidemicOutcome", "SweepResult", "mc_summary", "run_si",
    "run_si_jump", "sweep", "trial_stream",
]
