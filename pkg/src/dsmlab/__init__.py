"""Simulation of dark-state spatial modes in a counter-propagating EIT medium."""
from .analysis import Trajectory, extremum_times, fidelity, norm
from .config import PRESETS, ScenarioConfig, load_config, parse_config, preset
from .core import (
    ComplexField,
    DerivedParams,
    MediumParams,
    SpatialGrid,
    derive_eta,
    group_velocity,
    reduced_mass,
    reduced_vector_potential,
)
from .eigenmodes import ModeCatalog, build_hamiltonian, effective_rabi, project, solve_modes
from .potentials import FluxoniumParams, PotentialProfile, detuning_profile, fluxonium
from .scenario import Scenario
from .schedules import (
    GaussianPulse,
    GaussianPulses,
    ScheduleSpec,
    Sinusoidal,
    Static,
    ax_reduced,
    control_pair,
    modulation_signal,
)

__version__ = "0.1.0"
