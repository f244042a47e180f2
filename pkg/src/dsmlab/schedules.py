"""Time-dependent counter-propagating control fields and their synthetic vector potential.

The two controls are written as

    Omega_cR = Omega_c/sqrt(2) * sqrt(1 + s(t)),   Omega_cL = Omega_c/sqrt(2) * sqrt(1 - s(t))

so |Omega_cR|^2 + |Omega_cL|^2 = Omega_c^2 (constant effective mass) for any
modulation signal with |s| < 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

SUP_MARGIN = 1e-3
SUP_SAMPLES = 100_000


@dataclass(frozen=True)
class Static:
    pass


@dataclass(frozen=True)
class Sinusoidal:
    beta: float
    nu: float  # rad/s
    t_start: float = 0.0  # s; the signal is zero before this time


@dataclass(frozen=True)
class GaussianPulse:
    beta: float
    nu: float  # rad/s
    epsilon: float  # envelope centre [s]
    tau: float  # envelope 1/e half-width [s]


@dataclass(frozen=True)
class GaussianPulses:
    pulses: tuple[GaussianPulse, ...]

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))


def _signal(variant, t):
    t = np.asarray(t, dtype=float)
    if isinstance(variant, Static):
        return np.zeros_like(t)
    if isinstance(variant, Sinusoidal):
        return np.where(t >= variant.t_start, variant.beta * np.sin(variant.nu * t), 0.0)
    if isinstance(variant, GaussianPulses):
        s = np.zeros_like(t)
        for p in variant.pulses:
            s = s + p.beta * np.sin(p.nu * t) * np.exp(-(((t - p.epsilon) / p.tau) ** 2))
        return s
    raise TypeError(f"unknown schedule variant {variant!r}")


@dataclass(frozen=True)
class ScheduleSpec:
    """A modulation law plus the total control Rabi frequency it modulates.

    Construction rejects signals that reach |s| >= 1 - 1e-3 (the left or right
    control would need an imaginary amplitude).  Pulsed signals are checked on
    1e5 samples spanning every envelope out to 5 widths.
    """

    variant: Static | Sinusoidal | GaussianPulses
    omega_c: float

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ParameterError(f"omega_c must be positive, got {self.omega_c!r}")
        v = self.variant
        if isinstance(v, Sinusoidal):
            if not abs(v.beta) < 1 - SUP_MARGIN:
                raise ParameterError(f"|beta| must be < 1, got {v.beta}")
            if v.t_start < 0:
                raise ParameterError("t_start must be non-negative")
        elif isinstance(v, GaussianPulses):
            for p in v.pulses:
                if not abs(p.beta) < 1:
                    raise ParameterError(f"|beta_j| must be < 1, got {p.beta}")
                if not p.tau > 0:
                    raise ParameterError(f"pulse width tau must be positive, got {p.tau}")
            if v.pulses:
                t_hi = max(p.epsilon + 5 * p.tau for p in v.pulses)
                t = np.linspace(0.0, max(t_hi, 0.0), SUP_SAMPLES)
                sup = float(np.max(np.abs(_signal(v, t))))
                if sup >= 1 - SUP_MARGIN:
                    raise ParameterError(
                        f"combined modulation reaches |s| = {sup:.4f}; the control amplitudes need |s| < 1"
                    )
        elif not isinstance(v, Static):
            raise ParameterError(f"unknown schedule variant {v!r}")

    @classmethod
    def static(cls, omega_c: float) -> ScheduleSpec:
        return cls(Static(), omega_c)

    @property
    def kind(self) -> str:
        return {Static: "static", Sinusoidal: "sinusoidal", GaussianPulses: "gaussian"}[type(self.variant)]

    def envelope_window(self) -> float:
        """Total time during which some pulse envelope exceeds 1/e (length of the union
        of ``[epsilon_j - tau_j, epsilon_j + tau_j]``).  Zero for non-pulsed schedules."""
        if not isinstance(self.variant, GaussianPulses):
            return 0.0
        spans = sorted((p.epsilon - p.tau, p.epsilon + p.tau) for p in self.variant.pulses)
        total, cur_lo, cur_hi = 0.0, None, None
        for lo, hi in spans:
            if cur_hi is None or lo > cur_hi:
                if cur_hi is not None:
                    total += cur_hi - cur_lo
                cur_lo, cur_hi = lo, hi
            else:
                cur_hi = max(cur_hi, hi)
        if cur_hi is not None:
            total += cur_hi - cur_lo
        return total


def modulation_signal(spec: ScheduleSpec, t):
    """Dimensionless intensity-imbalance signal s(t)."""
    if np.any(np.asarray(t) < 0):
        raise ParameterError("modulation signal is defined for t >= 0 only")
    return _signal(spec.variant, t)


def control_pair(spec: ScheduleSpec, t):
    """Real right/left control Rabi frequencies at time(s) ``t``."""
    s = modulation_signal(spec, t)
    amp = spec.omega_c / math.sqrt(2.0)
    return amp * np.sqrt(1.0 + s), amp * np.sqrt(1.0 - s)


def ax_reduced(spec: ScheduleSpec, eta: float, delta_p: float, t):
    """A_x(t)/hbar = s(t) eta / (4 Delta_p), in 1/m."""
    return modulation_signal(spec, t) * eta / (4.0 * delta_p)
