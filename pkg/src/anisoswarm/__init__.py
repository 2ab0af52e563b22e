"""Anisotropic attraction/repulsion model of animal groups: simulation,
group-structure metrics and equilibrium checks."""

from .analysis import (
    ClosestSet,
    EquilibriumVerdict,
    closest_sets,
    hex_lattice,
    is_switching_configuration,
    verify_equilibrium,
)
from .integrator import RunRecord, StepResult, TerminationReason, random_initial, run, simulate, step
from .metrics import (
    MetricsReport,
    alignment_index,
    classify_pattern,
    compute_report,
    elongation,
    nn_angle_histogram,
    nnd,
)
from .model import (
    AgentState,
    ConfigError,
    Configuration,
    DegenerateConfigurationError,
    ModelParams,
    NeighborSets,
    in_attraction_zone,
    in_repulsion_zone,
    select_neighbors,
    velocity_field,
)
from .presets import PRESETS, preset

__version__ = "0.1.0"
