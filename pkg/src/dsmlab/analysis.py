"""Mode fidelities, norms, extremum extraction and the recorded trajectory type."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ComplexField
from .errors import FidelityUndefinedError, GridMismatchError


def norm(f: ComplexField) -> float:
    """Trapezoidal ``integral |f|^2 dx``."""
    return float(f.grid.integrate(np.abs(f.values) ** 2))


def fidelity(psi_n: ComplexField, f: ComplexField) -> float:
    """Normalized squared overlap of ``f`` with the mode ``psi_n``."""
    if psi_n.grid != f.grid:
        raise GridMismatchError("mode and field live on different grids")
    w = f.grid.weights
    nf = float(np.dot(w, np.abs(f.values) ** 2))
    if nf == 0.0:
        raise FidelityUndefinedError("fidelity of a zero-norm field is undefined")
    npsi = float(np.dot(w, np.abs(psi_n.values) ** 2))
    ov = np.dot(w, np.conj(psi_n.values) * f.values)
    return min(abs(ov) ** 2 / (npsi * nf), 1.0)


def fidelities(psi: np.ndarray, weights: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, float]:
    """Fast path used by the engines: fidelities of ``values`` against each row of ``psi``
    (assumed unit-norm), plus the field norm.  Returns zeros for a zero field."""
    nf = float(np.dot(weights, values.real**2 + values.imag**2))
    if nf == 0.0:
        return np.zeros(psi.shape[0]), 0.0
    ov = (psi * weights) @ values
    return np.minimum(np.abs(ov) ** 2 / nf, 1.0), nf


@dataclass
class Trajectory:
    """Recorded time series of one run.

    ``fidelities[i, j]`` is F_{modes[i]} at ``times[j]``; snapshots map the
    snapshot time to the complex field at that instant.
    """

    modes: tuple[int, ...]
    times: list = field(default_factory=list)
    fidelity_rows: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def record(self, t: float, f: np.ndarray, nrm: float) -> None:
        if self.times and not t > self.times[-1]:
            raise ValueError(f"trajectory times must increase strictly ({t} after {self.times[-1]})")
        self.times.append(float(t))
        self.fidelity_rows.append(np.asarray(f, dtype=float))
        self.norms.append(float(nrm))

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.times)

    @property
    def fidelities(self) -> np.ndarray:
        if not self.fidelity_rows:
            return np.zeros((len(self.modes), 0))
        return np.array(self.fidelity_rows).T

    @property
    def norm(self) -> np.ndarray:
        return np.asarray(self.norms)

    def F(self, mode: int) -> np.ndarray:
        return self.fidelities[self.modes.index(mode)]

    def at(self, t: float) -> int:
        """Index of the recorded sample closest to ``t``."""
        return int(np.argmin(np.abs(self.t - t)))


def extrema(times, values) -> list[tuple[float, float, str]]:
    """Local extrema of a uniformly sampled series as ``(t, value, 'max'|'min')``,
    refined by a parabola through the three samples around each one."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    out = []
    for i in range(1, v.size - 1):
        if v[i] > v[i - 1] and v[i] >= v[i + 1]:
            kind = "max"
        elif v[i] < v[i - 1] and v[i] <= v[i + 1]:
            kind = "min"
        else:
            continue
        curv = v[i - 1] - 2 * v[i] + v[i + 1]
        h = 0.5 * (t[i + 1] - t[i - 1])
        if curv == 0:
            out.append((t[i], v[i], kind))
            continue
        off = 0.5 * (v[i - 1] - v[i + 1]) / curv
        out.append((t[i] + off * h, v[i] - 0.25 * (v[i - 1] - v[i + 1]) * off, kind))
    return out


def extremum_times(trajectory: Trajectory, mode_index: int) -> list[float]:
    if len(trajectory.times) < 3:
        raise ValueError("need at least three samples to locate extrema")
    return [e[0] for e in extrema(trajectory.t, trajectory.F(mode_index))]
