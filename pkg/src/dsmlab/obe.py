"""Full optical-Bloch / probe-propagation engine.

The probe fields are treated quasi-statically: the light transit time L/c
(tens of picoseconds) is far below every atomic time scale, so at each
instant the probes follow from integrating their propagation equations
across the medium.  The default ``implicit`` scheme advances atoms and
probes together with the trapezoidal rule (see ``_kernels``).  The
``exponential-splitting`` and ``rk4`` schemes step the atoms explicitly and
re-propagate the probes at every stage.  They are kept for cross-checks: at
1 ns the exponential scheme is stable but an order of magnitude less
accurate than the implicit one under a modulated drive, and rk4 needs
steps of a few tens of picoseconds.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.sparse.linalg import LinearOperator, gmres

from ._kernels import implicit_steps
from .analysis import Trajectory, fidelities, fidelity
from .core import ComplexField, MediumParams, SpatialGrid
from .eigenmodes import ModeCatalog
from .errors import DivergenceError, ParameterError, WeakProbeError
from .schedules import control_pair

log = logging.getLogger(__name__)

SCHEMES = ("implicit", "exponential-splitting", "rk4")


@dataclass(frozen=True)
class OBESolverConfig:
    dt: float = 1e-9
    record_every: int = 1000
    atom_scheme: str = "implicit"
    probe_model: str = "quasi-static"
    init_amplitude: float = 0.05

    def validate(self, medium: MediumParams) -> None:
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if self.record_every < 1:
            raise ParameterError("record_every must be >= 1")
        if self.atom_scheme not in SCHEMES:
            raise ParameterError(f"atom_scheme must be one of {SCHEMES}, got {self.atom_scheme!r}")
        if self.probe_model != "quasi-static":
            raise ParameterError(f"unsupported probe model {self.probe_model!r}")
        if self.atom_scheme == "rk4" and self.dt * medium.gamma_e / 2 > 0.2:
            raise ParameterError("rk4 needs dt * Gamma/2 <= 0.2")


@dataclass
class OBEState:
    """Atomic coherences and probe Rabi frequencies at time ``t`` (mutable, one per run)."""

    t: float
    grid: SpatialGrid
    rho21: np.ndarray
    rho31R: np.ndarray
    rho31L: np.ndarray
    omega_pR: np.ndarray
    omega_pL: np.ndarray

    def __post_init__(self):
        for name in ("rho21", "rho31R", "rho31L", "omega_pR", "omega_pL"):
            v = np.array(getattr(self, name), dtype=np.complex128)
            if v.shape != (self.grid.n,):
                raise ParameterError(f"{name} has shape {v.shape}, grid has n={self.grid.n}")
            setattr(self, name, v)

    def copy(self) -> OBEState:
        return OBEState(self.t, self.grid, self.rho21, self.rho31R, self.rho31L, self.omega_pR, self.omega_pL)

    def field(self) -> ComplexField:
        return ComplexField(self.grid, self.rho21)

    def check(self, step: int | None = None) -> None:
        arrays = (self.rho21, self.rho31R, self.rho31L, self.omega_pR, self.omega_pL)
        if not all(np.all(np.isfinite(v)) for v in arrays):
            raise DivergenceError(f"non-finite values at t = {self.t:.9e} s (step {step})", self.t, step)
        peak = float(np.max(np.abs(self.rho21)))
        if peak > 1.0:
            raise WeakProbeError(f"max|rho21| = {peak:.3g} > 1 at t = {self.t:.9e} s; rescale the initial state")


def init_dark_state(catalog: ModeCatalog, mode_index: int, amplitude: complex, controls_at_t0) -> OBEState:
    """Spin wave shaped like mode ``mode_index`` with peak |rho21| = |amplitude|,
    plus the probes ``-Omega_c rho21`` that keep the excited state empty.

    The modes carry units of m^-1/2, so the amplitude sets the peak coherence
    rather than multiplying the normalized mode directly.
    """
    psi = catalog.mode(mode_index)
    if abs(amplitude) > 1.0:
        raise WeakProbeError(
            f"amplitude {abs(amplitude):.3g} gives max|rho21| > 1; the weak-probe equations do not apply"
        )
    cR, cL = (complex(c) for c in controls_at_t0)
    rho21 = amplitude * psi.astype(np.complex128) / np.max(np.abs(psi))
    zero = np.zeros(catalog.grid.n, np.complex128)
    return OBEState(0.0, catalog.grid, rho21, zero, zero, -cR * rho21, -cL * rho21)


def propagate_probes(state: OBEState, eta: float, input_R: complex = 0.0, input_L: complex = 0.0):
    """Quasi-static probe fields from the optical coherences (trapezoidal rule).

    The right-going probe is integrated from ``x_min`` and the left-going one
    from ``x_max``, each starting from its boundary input.
    """
    dx = state.grid.dx
    pR = input_R + 1j * eta * cumulative_trapezoid(state.rho31R, dx=dx, initial=0.0)
    pL = input_L + 1j * eta * cumulative_trapezoid(state.rho31L[::-1], dx=dx, initial=0.0)[::-1]
    return pR, pL


def _coupling(r, a, b, P, Q, cR, cL):
    return 0.5j * (cR * a + cL * b), 0.5j * (P + cR * r), 0.5j * (Q + cL * r)


def step_atoms(state: OBEState, dt: float, delta_c: np.ndarray, medium: MediumParams, controls,
               scheme: str = "exponential-splitting", inputs=((0.0, 0.0), (0.0, 0.0))) -> None:
    """Advance the coherences of ``state`` by ``dt`` in place with an explicit scheme.

    ``controls`` is ``((cR(t), cL(t)), (cR(t+dt), cL(t+dt)))``.  The probes
    are re-propagated at intermediate stages and left consistent with the new
    coherences on return.
    """
    eta = medium.derived.eta
    lam21 = 1j * (delta_c - medium.delta_p) - medium.gamma_d
    lam31 = -(0.5 * medium.gamma_e + 1j * medium.delta_p)
    (c0R, c0L), (c1R, c1L) = controls
    (i0R, i0L), (i1R, i1L) = inputs
    y0 = (state.rho21, state.rho31R, state.rho31L)

    def probes(r, a, b, inR, inL):
        tmp = OBEState.__new__(OBEState)
        tmp.grid, tmp.rho31R, tmp.rho31L = state.grid, a, b
        return propagate_probes(tmp, eta, inR, inL)

    def rhs(y, cR, cL, inR, inL, with_diag):
        r, a, b = y
        P, Q = probes(r, a, b, inR, inL)
        n21, nR, nL = _coupling(r, a, b, P, Q, cR, cL)
        if with_diag:
            return (n21 + lam21 * r, nR + lam31 * a, nL + lam31 * b)
        return (n21, nR, nL)

    if scheme == "exponential-splitting":
        E21 = np.exp(lam21 * dt)
        E31 = np.exp(lam31 * dt)
        E = (E21, E31, E31)
        N0 = _coupling(*y0, state.omega_pR, state.omega_pL, c0R, c0L)
        ystar = tuple(Ei * (yi + dt * ni) for Ei, yi, ni in zip(E, y0, N0))
        N1 = rhs(ystar, c1R, c1L, i1R, i1L, False)
        y1 = tuple(Ei * yi + 0.5 * dt * (Ei * n0 + n1) for Ei, yi, n0, n1 in zip(E, y0, N0, N1))
    elif scheme == "rk4":
        cmR, cmL = 0.5 * (c0R + c1R), 0.5 * (c0L + c1L)
        imR, imL = 0.5 * (i0R + i1R), 0.5 * (i0L + i1L)
        k1 = rhs(y0, c0R, c0L, i0R, i0L, True)
        k2 = rhs(tuple(y + 0.5 * dt * k for y, k in zip(y0, k1)), cmR, cmL, imR, imL, True)
        k3 = rhs(tuple(y + 0.5 * dt * k for y, k in zip(y0, k2)), cmR, cmL, imR, imL, True)
        k4 = rhs(tuple(y + dt * k for y, k in zip(y0, k3)), c1R, c1L, i1R, i1L, True)
        y1 = tuple(y + dt / 6 * (p + 2 * q + 2 * u + v) for y, p, q, u, v in zip(y0, k1, k2, k3, k4))
    else:
        raise ParameterError(f"step_atoms handles explicit schemes only, got {scheme!r}")
    state.rho21, state.rho31R, state.rho31L = (np.asarray(v, np.complex128) for v in y1)
    state.omega_pR, state.omega_pL = propagate_probes(state, eta, i1R, i1L)
    state.t += dt


def integrate(state: OBEState, medium: MediumParams, delta_c: np.ndarray, cR: np.ndarray, cL: np.ndarray,
              dt: float, scheme: str = "implicit", pin=None, qin=None) -> None:
    """Advance ``state`` in place over ``len(cR) - 1`` steps with sampled controls.

    ``cR``/``cL`` (and the optional probe inputs ``pin``/``qin``) are sampled
    at ``state.t + i*dt`` for i = 0..nsteps.
    """
    nsteps = len(cR) - 1
    if nsteps <= 0:
        return
    pin = np.zeros(nsteps + 1, np.complex128) if pin is None else np.asarray(pin, np.complex128)
    qin = np.zeros(nsteps + 1, np.complex128) if qin is None else np.asarray(qin, np.complex128)
    if scheme == "implicit":
        g = (1j * (delta_c - medium.delta_p) - medium.gamma_d).astype(np.complex128)
        D = complex(0.5 * medium.gamma_e + 1j * medium.delta_p)
        implicit_steps(
            state.rho21, state.rho31R, state.rho31L, state.omega_pR, state.omega_pL,
            g, D, medium.derived.eta, state.grid.dx, dt,
            np.ascontiguousarray(cR, dtype=np.float64), np.ascontiguousarray(cL, dtype=np.float64),
            pin, qin, nsteps,
        )
        state.t += nsteps * dt
    else:
        for i in range(nsteps):
            step_atoms(state, dt, delta_c, medium, ((cR[i], cL[i]), (cR[i + 1], cL[i + 1])), scheme,
                       ((pin[i], qin[i]), (pin[i + 1], qin[i + 1])))


def _breakpoints(nsteps: int, record_every: int, snapshot_steps) -> list[int]:
    pts = set(range(record_every, nsteps + 1, record_every))
    pts.update(s for s in snapshot_steps if 0 < s <= nsteps)
    pts.add(nsteps)
    return sorted(pts)


def run(scenario, config: OBESolverConfig = OBESolverConfig(), state: OBEState | None = None) -> Trajectory:
    """Integrate the optical-Bloch equations over ``scenario.duration``.

    Starts from the dark state of ``scenario.init_mode`` unless an explicit
    ``state`` is given.  Records fidelities and norm every
    ``config.record_every`` steps and snapshots at the steps nearest to
    ``scenario.snapshot_times``.
    """
    medium = scenario.medium
    config.validate(medium)
    dt = config.dt
    nsteps = int(round(scenario.duration / dt))
    t_all = np.arange(nsteps + 1) * dt
    cR, cL = control_pair(scenario.schedule, t_all)
    if state is None:
        state = init_dark_state(scenario.catalog, scenario.init_mode, config.init_amplitude, (cR[0], cL[0]))
    else:
        state = state.copy()
    psi = scenario.mode_matrix
    w = scenario.grid.weights
    delta_c = scenario.delta_c
    snap_steps = {int(round(ts / dt)): ts for ts in scenario.snapshot_times}

    traj = Trajectory(tuple(scenario.recorded_modes))
    traj.info.update(engine="obe", dt=dt, steps=nsteps, scheme=config.atom_scheme, n=scenario.grid.n)

    def sample(step):
        F, nrm = fidelities(psi, w, state.rho21)
        traj.record(step * dt, F, nrm)

    def snap(step):
        if step in snap_steps:
            traj.snapshots[snap_steps[step]] = state.field()

    wall = time.perf_counter()
    sample(0)
    snap(0)
    done = 0
    for stop in _breakpoints(nsteps, config.record_every, snap_steps):
        integrate(state, medium, delta_c, cR[done : stop + 1], cL[done : stop + 1], dt, config.atom_scheme)
        state.t = stop * dt
        done = stop
        state.check(stop)
        if stop % config.record_every == 0 or stop == nsteps:
            sample(stop)
        snap(stop)
    traj.info["wall_time"] = time.perf_counter() - wall
    traj.info["final_state"] = state
    log.info("obe run: %d steps in %.1f s", nsteps, traj.info["wall_time"])
    return traj


@dataclass(frozen=True)
class WritePulse:
    """Right-going probe injected at x_min and stored by switching the right control off.

    The input envelope is shaped so that, just before the ramp, an ideal
    slow-light pulse inside the medium would reproduce ``target`` (sign
    changes included).  Slow-light dispersion and the diffusive loss distort
    the pulse on its way in; ``shaping_iterations > 0`` pre-compensates by
    solving for the input profile with GMRES, one write simulation per
    iteration.
    """

    target: np.ndarray = field(repr=False)  # desired rho21 profile on the grid (shape only)
    amplitude: float = 0.05  # peak |rho21| of the target after scaling
    omega_write: float = 0.0  # write-stage control Rabi frequency; 0 -> medium.omega_c
    ramp: float = 0.2e-6  # control switch-off time [s]
    hold: float = 0.2e-6  # storage time after the ramp [s]
    dt: float = 1e-9
    shaping_iterations: int = 8


def _write(profile: np.ndarray, write: WritePulse, scenario) -> OBEState:
    """Store the pulse whose ideal in-medium shape is ``profile``; linear in ``profile``."""
    medium = scenario.medium
    grid = scenario.grid
    oc = write.omega_write or medium.omega_c
    vg = oc**2 / (2 * medium.derived.eta)
    x = grid.x
    t_write = (grid.x_max - grid.x_min) / vg
    n_w = int(round(t_write / write.dt))
    n_r = int(round((write.ramp + write.hold) / write.dt))
    t = np.arange(n_w + n_r + 1) * write.dt
    ramp = np.clip((t - t_write) / write.ramp, 0.0, 1.0)
    cR = oc * np.cos(0.5 * np.pi * ramp)
    cL = np.zeros_like(cR)
    # the field entering at time t travels to x_min + vg (t_write - t) by the end of writing
    pos = grid.x_min + vg * (t_write - t)
    pin = -oc * (np.interp(pos, x, profile.real, left=0, right=0) + 1j * np.interp(pos, x, profile.imag, left=0, right=0))
    pin[t > t_write] = 0.0
    zero = np.zeros(grid.n, np.complex128)
    state = OBEState(0.0, grid, zero, zero, zero, zero, zero)
    flat = np.full(grid.n, medium.delta_p)
    integrate(state, medium, flat, cR, cL, write.dt, "implicit", pin=pin)
    return state


def prepare_via_storage(write: WritePulse, scenario) -> tuple[OBEState, float]:
    """Write a spin wave by EIT light storage; returns the stored state and its
    fidelity with the target profile (0 when nothing was stored).

    The potential is switched off during writing (flat two-photon resonance)
    and only the right-going control is on.
    """
    grid = scenario.grid
    target = np.asarray(write.target, dtype=np.complex128)
    if target.shape != (grid.n,):
        raise ParameterError(f"target has shape {target.shape}, grid has n={grid.n}")
    peak = np.max(np.abs(target))
    if peak == 0:
        state = _write(target, write, scenario)
        return state, 0.0
    target = write.amplitude * target / peak
    profile = target
    if write.shaping_iterations > 0:
        op = LinearOperator((grid.n, grid.n), matvec=lambda v: _write(np.asarray(v).ravel(), write, scenario).rho21,
                            dtype=np.complex128)
        profile, _ = gmres(op, target, x0=target, restart=write.shaping_iterations, maxiter=1)
    state = _write(profile, write, scenario)
    state.check()
    stored = state.field()
    if not np.any(stored.values):
        return state, 0.0
    return state, fidelity(ComplexField(grid, target), stored)
