"""Synthetic scalar potentials and the control-detuning profiles that realize them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import MM, SpatialGrid
from .errors import ParameterError


@dataclass(frozen=True)
class FluxoniumParams:
    """Quadratic-plus-cosine potential ``C1 [x^2 + alpha^2 cos(2 pi x / lambda_f + phi)]``.

    Lengths are in millimetres and ``c1`` in rad s^-1 mm^-2, matching how the
    potential parameters are usually quoted.
    """

    c1: float
    alpha: float
    lambda_f: float
    phi: float

    def __post_init__(self):
        if not self.lambda_f > 0:
            raise ParameterError(f"lambda_f must be positive, got {self.lambda_f!r}")
        if not all(math.isfinite(v) for v in (self.c1, self.alpha, self.phi)):
            raise ParameterError("fluxonium parameters must be finite")


@dataclass(frozen=True, eq=False)
class PotentialProfile:
    """Real potential U(x)/hbar on a grid; the dephasing ``-i gamma_d`` is kept separately."""

    grid: SpatialGrid
    u: np.ndarray = field(repr=False)
    gamma_d: float = 0.0

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.shape != (self.grid.n,):
            raise ParameterError(f"potential has shape {u.shape}, grid has n={self.grid.n}")
        if not np.all(np.isfinite(u)):
            raise ParameterError("potential must be finite on the grid")
        u.flags.writeable = False
        object.__setattr__(self, "u", u)

    @property
    def floor(self) -> float:
        """Minimum of U/hbar on the grid."""
        return float(self.u.min())


def fluxonium(params: FluxoniumParams, grid: SpatialGrid, gamma_d: float = 0.0) -> PotentialProfile:
    x = grid.x / MM
    u = params.c1 * (x**2 + params.alpha**2 * np.cos(2.0 * np.pi * x / params.lambda_f + params.phi))
    return PotentialProfile(grid, u, gamma_d)


def detuning_profile(
    profile: PotentialProfile,
    delta_p: float,
    include_ax_correction: bool = False,
    ax_rms: float = 0.0,
    m_reduced: float | None = None,
) -> np.ndarray:
    """Control detuning Delta_c(x) that makes the two-photon detuning equal U(x)/hbar.

    With ``include_ax_correction`` the constant ``ax_rms^2 / (2 m)`` estimate of
    the |A_x|^2 term is also subtracted.
    """
    delta_c = delta_p - profile.u
    if include_ax_correction:
        if not m_reduced:
            raise ParameterError("m_reduced is required for the A_x correction")
        delta_c = delta_c - ax_rms**2 / (2.0 * m_reduced)
    return delta_c
