"""Units, medium parameters, the spatial grid and the derived EIT quantities.

Everything is expressed with hbar divided out: potentials are angular
frequencies (U/hbar in rad/s), the effective mass is m/hbar in s/m^2 and the
vector potential is A_x/hbar in 1/m.  Internal units are SI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridMismatchError, ParameterError, SingularParameterError

SPEED_OF_LIGHT = 299_792_458.0  # m/s; only used to justify the quasi-static probe

# conversion factors into SI
MM = 1e-3
MS = 1e-3
US = 1e-6
NS = 1e-9
RAD_KHZ = 1e3  # "rad kHz" as quoted for mode frequencies, in rad/s


def mhz_x2pi(f_mhz: float) -> float:
    """Angular frequency of a rate quoted as 2*pi x f MHz."""
    return 2.0 * math.pi * f_mhz * 1e6


@dataclass(frozen=True)
class MediumParams:
    """Physical constants of the Lambda-type EIT medium (all angular frequencies in rad/s)."""

    gamma_e: float  # excited-state decay rate
    gamma_d: float  # ground-state dephasing
    delta_p: float  # one-photon probe detuning
    optical_depth: float
    length: float  # medium length [m]
    omega_c: float  # total control Rabi frequency

    def __post_init__(self):
        for name in ("gamma_e", "optical_depth", "length", "omega_c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive, got {v!r}")
        if not (math.isfinite(self.gamma_d) and self.gamma_d >= 0):
            raise ParameterError(f"gamma_d must be non-negative, got {self.gamma_d!r}")
        if not math.isfinite(self.delta_p):
            raise ParameterError("delta_p must be finite")
        if self.delta_p == 0:
            raise SingularParameterError("delta_p = 0 makes the effective mass diverge")

    @cached_property
    def derived(self) -> DerivedParams:
        return DerivedParams.from_medium(self)


@dataclass(frozen=True)
class DerivedParams:
    eta: float  # light-matter coupling [rad s^-1 m^-1]
    m_reduced: float  # m/hbar [s m^-2]
    diffusion_ratio: float  # Gamma / (2 Delta_p)

    @classmethod
    def from_medium(cls, medium: MediumParams) -> DerivedParams:
        eta = derive_eta(medium.gamma_e, medium.optical_depth, medium.length)
        return cls(
            eta=eta,
            m_reduced=reduced_mass(eta, medium.delta_p, medium.omega_c),
            diffusion_ratio=medium.gamma_e / (2.0 * medium.delta_p),
        )


def derive_eta(gamma_e: float, optical_depth: float, length: float) -> float:
    """Light-matter coupling constant ``Gamma * OD / (2 L)``."""
    for name, v in (("gamma_e", gamma_e), ("optical_depth", optical_depth), ("length", length)):
        if not v > 0:
            raise ParameterError(f"{name} must be positive, got {v!r}")
    return gamma_e * optical_depth / (2.0 * length)


def reduced_mass(eta: float, delta_p: float, omega_c: float) -> float:
    """Effective polariton mass divided by hbar, ``eta^2 / (2 Delta_p Omega_c^2)``.

    Negative for red probe detuning; the eigenmode solver rejects that case.
    """
    if delta_p == 0:
        raise SingularParameterError("delta_p = 0 makes the effective mass diverge")
    if not omega_c > 0:
        raise ParameterError(f"omega_c must be positive, got {omega_c!r}")
    return eta**2 / (2 * delta_p * omega_c**2)


def group_velocity(omega_cR, omega_cL, eta: float):
    """EIT group velocity (m/s) of the counter-propagating control pair."""
    if not eta > 0:
        raise ParameterError(f"eta must be positive, got {eta!r}")
    return (np.abs(omega_cR) ** 2 - np.abs(omega_cL) ** 2) / (2.0 * eta)


def reduced_vector_potential(m_reduced: float, v_g):
    """Synthetic vector potential A_x/hbar (1/m) for a unit charge."""
    return m_reduced * v_g


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform 1D grid including both end points."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16:
            raise ParameterError(f"grid needs an integer n >= 16, got {self.n!r}")
        if not self.x_max > self.x_min:
            raise ParameterError("x_max must exceed x_min")

    @classmethod
    def spanning(cls, length: float, n: int = 1024) -> SpatialGrid:
        """Grid covering the medium [-L/2, L/2]."""
        return cls(-0.5 * length, 0.5 * length, n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = np.linspace(self.x_min, self.x_max, self.n)
        x.flags.writeable = False
        return x

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights."""
        w = np.full(self.n, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        w.flags.writeable = False
        return w

    def integrate(self, values) -> complex | float:
        return np.dot(self.weights, values)

    def check_same(self, other: SpatialGrid) -> None:
        if self != other:
            raise GridMismatchError(f"grid mismatch: {self} vs {other}")


@dataclass(frozen=True, eq=False)
class ComplexField:
    """A complex-valued function sampled on a SpatialGrid."""

    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n,):
            raise GridMismatchError(f"field has shape {v.shape}, grid has n={self.grid.n}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __mul__(self, c) -> ComplexField:
        return ComplexField(self.grid, self.values * c)

    __rmul__ = __mul__
