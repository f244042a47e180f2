"""Reduced dark-state-polariton model: a Schroedinger-like equation with a synthetic
vector potential, a complex (diffusive) kinetic term and uniform dephasing.

With a spatially uniform vector potential a(t) the generator is

    H(t) = -(1 - i r)/(2m) d2/dx2 - i (a/m) d/dx + u(x) + a^2/(2m) - i gamma

(r = Gamma / (2 Delta_p)), discretized with central differences on the
interior points and advanced by Crank-Nicolson.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .analysis import Trajectory, fidelities
from .core import ComplexField
from .errors import DivergenceError, NumericError, ParameterError
from .potentials import PotentialProfile
from .schedules import ScheduleSpec, ax_reduced

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DSPSolverConfig:
    dt: float = 10e-9
    record_every: int = 100
    diffusion: bool = True
    init_amplitude: float = 0.05  # peak |psi| of the initial mode, as in the OBE engine


@dataclass
class DSPState:
    t: float
    psi: ComplexField


def _bands(dx, m, diff_ratio, u_int, gamma, a):
    cd = (1.0 - 1j * diff_ratio) / (2.0 * m * dx * dx)
    drift = 1j * (a / m) / (2.0 * dx)
    diag = 2.0 * cd + u_int + a * a / (2.0 * m) - 1j * gamma
    return diag, -cd - drift, -cd + drift  # diag, upper, lower


def evolve(psi0: ComplexField, potential: PotentialProfile, schedule: ScheduleSpec, m_reduced: float,
           diffusion_ratio: float, gamma_d: float, T: float, dt: float, *, eta: float, delta_p: float,
           modes: np.ndarray | None = None, mode_ids=(1, 2, 3), record_every: int = 100,
           snapshot_times=()) -> Trajectory:
    """Crank-Nicolson evolution of ``psi0`` over ``[0, T]``.

    The vector potential is taken from ``schedule`` at each step midpoint.
    ``modes`` (rows, unit norm) are used for the recorded fidelities.
    """
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if not m_reduced > 0:
        raise ParameterError("the reduced model needs a positive effective mass")
    grid = psi0.grid
    grid.check_same(potential.grid)
    dx = grid.dx
    u_int = potential.u[1:-1]
    psi = np.array(psi0.values[1:-1], dtype=np.complex128)
    full = np.zeros(grid.n, np.complex128)
    nsteps = int(round(T / dt))
    t_mid = (np.arange(nsteps) + 0.5) * dt
    a_t = ax_reduced(schedule, eta, delta_p, t_mid) if nsteps else np.zeros(0)
    w = grid.weights
    if modes is None:
        modes = np.zeros((0, grid.n))
        mode_ids = ()
    snap_steps = {int(round(ts / dt)): ts for ts in snapshot_times}

    traj = Trajectory(tuple(mode_ids))
    traj.info.update(engine="dsp", dt=dt, steps=nsteps, n=grid.n)

    def emit(step):
        full[1:-1] = psi
        if step % record_every == 0 or step == nsteps:
            F, nrm = fidelities(modes, w, full)
            traj.record(step * dt, F, nrm)
        if step in snap_steps:
            traj.snapshots[snap_steps[step]] = ComplexField(grid, full.copy())

    ab = np.zeros((3, psi.size), np.complex128)
    wall = time.perf_counter()
    emit(0)
    last_a = None
    for i in range(nsteps):
        a = float(a_t[i])
        if a != last_a:
            diag, up, lo = _bands(dx, m_reduced, diffusion_ratio, u_int, gamma_d, a)
            ab[0, 1:] = 0.5j * dt * up
            ab[1] = 1.0 + 0.5j * dt * diag
            ab[2, :-1] = 0.5j * dt * lo
            last_a = a
        rhs = psi - 0.5j * dt * diag * psi
        rhs[:-1] -= 0.5j * dt * up * psi[1:]
        rhs[1:] -= 0.5j * dt * lo * psi[:-1]
        try:
            psi = solve_banded((1, 1), ab, rhs, check_finite=False)
        except (LinAlgError, ValueError) as exc:
            raise NumericError(f"tridiagonal solve failed at step {i + 1}: {exc}") from exc
        if (i + 1) % record_every == 0 and not np.all(np.isfinite(psi)):
            raise DivergenceError(f"non-finite values at t = {(i + 1) * dt:.9e} s", (i + 1) * dt, i + 1)
        emit(i + 1)
    traj.info["wall_time"] = time.perf_counter() - wall
    full[1:-1] = psi
    traj.info["final_state"] = DSPState(nsteps * dt, ComplexField(grid, full.copy()))
    log.info("dsp run: %d steps in %.1f s", nsteps, traj.info["wall_time"])
    return traj


def run(scenario, config: DSPSolverConfig = DSPSolverConfig(), psi0: ComplexField | None = None) -> Trajectory:
    medium = scenario.medium
    d = medium.derived
    if psi0 is None:
        mode = scenario.catalog.mode(scenario.init_mode)
        psi0 = ComplexField(scenario.grid, config.init_amplitude * mode / np.max(np.abs(mode)))
    return evolve(
        psi0, scenario.potential, scenario.schedule, d.m_reduced,
        d.diffusion_ratio if config.diffusion else 0.0, medium.gamma_d, scenario.duration, config.dt,
        eta=d.eta, delta_p=medium.delta_p, modes=scenario.mode_matrix, mode_ids=scenario.recorded_modes,
        record_every=config.record_every, snapshot_times=scenario.snapshot_times,
    )
