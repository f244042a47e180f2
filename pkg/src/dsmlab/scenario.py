"""A fully resolved simulation scenario shared by both engines."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import MediumParams, SpatialGrid
from .eigenmodes import ModeCatalog, build_hamiltonian, solve_modes
from .potentials import PotentialProfile, detuning_profile
from .schedules import ScheduleSpec


@dataclass(frozen=True, eq=False)
class Scenario:
    medium: MediumParams
    grid: SpatialGrid
    potential: PotentialProfile
    schedule: ScheduleSpec
    duration: float
    init_mode: int = 1
    recorded_modes: tuple[int, ...] = (1, 2, 3)
    snapshot_times: tuple[float, ...] = ()
    include_ax_correction: bool = False
    ax_rms: float = 0.0
    catalog: ModeCatalog = field(default=None, repr=False)

    def __post_init__(self):
        if self.catalog is None:
            k = max(max(self.recorded_modes), self.init_mode)
            H = build_hamiltonian(self.grid, self.medium.derived.m_reduced, self.potential.u)
            object.__setattr__(self, "catalog", solve_modes(H, k))

    @cached_property
    def delta_c(self) -> np.ndarray:
        d = self.medium.derived
        return detuning_profile(
            self.potential, self.medium.delta_p, self.include_ax_correction, self.ax_rms, d.m_reduced
        )

    @property
    def mode_matrix(self) -> np.ndarray:
        return np.array([self.catalog.mode(n) for n in self.recorded_modes])
