import math
from dataclasses import replace

import numpy as np
import pytest

from dsmlab import ComplexField, ScheduleSpec, Sinusoidal, fidelity, preset
from dsmlab import dsp, obe
from dsmlab.core import MM
from dsmlab.errors import DivergenceError, ParameterError, WeakProbeError

NU = 376.4e3


@pytest.fixture(scope="module")
def rabi():
    cfg = preset("rabi")
    return cfg, cfg.build()


def modulated(sc, duration, t_start=0.0, beta=0.07):
    return replace(sc, duration=duration, snapshot_times=(),
                   schedule=ScheduleSpec(Sinusoidal(beta, NU, t_start), sc.medium.omega_c))


def static(sc, duration):
    return replace(sc, duration=duration, snapshot_times=(), schedule=ScheduleSpec.static(sc.medium.omega_c))


def test_init_dark_state(rabi):
    cfg, sc = rabi
    oc = cfg.medium.omega_c
    c = (oc / math.sqrt(2),) * 2
    zero = obe.init_dark_state(sc.catalog, 1, 0.0, c)
    for v in (zero.rho21, zero.rho31R, zero.rho31L, zero.omega_pR, zero.omega_pL):
        assert not np.any(v)
    st = obe.init_dark_state(sc.catalog, 1, 0.05, c)
    psi = sc.catalog.mode(1)
    assert np.max(np.abs(st.rho21)) == pytest.approx(0.05, rel=1e-14)
    assert fidelity(sc.catalog.field(1), st.field()) == pytest.approx(1, abs=1e-14)
    assert np.allclose(st.omega_pR, -(oc / math.sqrt(2)) * 0.05 * psi / np.abs(psi).max(), rtol=1e-14, atol=0)
    assert np.array_equal(st.omega_pR, st.omega_pL)
    assert not np.any(st.rho31R) and not np.any(st.rho31L)
    with pytest.raises(WeakProbeError):
        obe.init_dark_state(sc.catalog, 1, 1.5, c)
    with pytest.raises(ParameterError):
        obe.init_dark_state(sc.catalog, 9, 0.05, c)


def test_propagate_probes_exact_integrals(rabi):
    _, sc = rabi
    g = sc.grid
    eta = sc.medium.derived.eta
    z = np.zeros(g.n, complex)
    st = obe.OBEState(0.0, g, z, z, z, z, z)
    pR, pL = obe.propagate_probes(st, eta)
    assert not np.any(pR) and not np.any(pL)
    c = 2e-4 - 1e-4j
    st = obe.OBEState(0.0, g, z, np.full(g.n, c), np.full(g.n, c), z, z)
    pR, pL = obe.propagate_probes(st, eta)
    assert np.allclose(pR, 1j * eta * c * (g.x - g.x_min), rtol=1e-12, atol=1e-9 * abs(eta * c) * MM)
    assert np.allclose(pL, 1j * eta * c * (g.x_max - g.x), rtol=1e-12, atol=1e-9 * abs(eta * c) * MM)
    pR, pL = obe.propagate_probes(st, eta, input_R=3.0, input_L=-2.0)
    assert pR[0] == 3.0 and pL[-1] == -2.0


def uncoupled(sc):
    # vanishing optical depth removes the probe feedback; no controls means no coupling at all
    med = replace(sc.medium, optical_depth=1e-30)
    return med


def test_free_optical_decay_is_exact(rabi):
    _, sc = rabi
    med = uncoupled(sc)
    g = sc.grid
    c = 1e-3 + 2e-3j
    z = np.zeros(g.n, complex)
    dt = 1e-9
    st = obe.OBEState(0.0, g, z, np.full(g.n, c), z, z, z)
    obe.step_atoms(st, dt, np.full(g.n, med.delta_p), med, ((0.0, 0.0), (0.0, 0.0)))
    exact = c * np.exp(-(0.5 * med.gamma_e + 1j * med.delta_p) * dt)
    assert np.allclose(st.rho31R, exact, rtol=1e-14, atol=0)
    # the trapezoidal scheme gives the (1,1) Pade approximant of the same factor
    st = obe.OBEState(0.0, g, z, np.full(g.n, c), z, z, z)
    obe.integrate(st, med, np.full(g.n, med.delta_p), np.zeros(2), np.zeros(2), dt)
    lam = -(0.5 * med.gamma_e + 1j * med.delta_p) * dt
    assert np.allclose(st.rho31R, c * (1 + lam / 2) / (1 - lam / 2), rtol=1e-12, atol=0)
    assert np.max(np.abs(st.rho31R - exact)) <= abs(lam) ** 3 / 12 * abs(c) * 1.1


def test_pure_dephasing(rabi):
    _, sc = rabi
    med = uncoupled(sc)
    g = sc.grid
    z = np.zeros(g.n, complex)
    r0 = np.full(g.n, 0.01 + 0j)
    flat = np.full(g.n, med.delta_p)
    st = obe.OBEState(0.0, g, r0, z, z, z, z)
    for _ in range(100):
        obe.step_atoms(st, 1e-8, flat, med, ((0.0, 0.0), (0.0, 0.0)))
    assert np.allclose(st.rho21, 0.01 * math.exp(-med.gamma_d * 1e-6), rtol=1e-12, atol=0)
    st = obe.OBEState(0.0, g, r0, z, z, z, z)
    obe.integrate(st, med, flat, np.zeros(1001), np.zeros(1001), 1e-9)
    assert np.allclose(st.rho21, 0.01 * math.exp(-med.gamma_d * 1e-6), rtol=1e-9, atol=0)


def test_dark_state_protection(rabi):
    _, sc = rabi
    tr = obe.run(static(sc, 1e-6), obe.OBESolverConfig(record_every=100))
    st = tr.info["final_state"]
    ratio = np.max(np.abs(st.rho31R)) / np.max(np.abs(st.rho21))
    # adiabatic following: rho31 ~ (Omega_c / eta) d/dx rho21, a few percent for these modes
    d_rho = np.max(np.abs(np.gradient(st.rho21, sc.grid.dx))) / np.max(np.abs(st.rho21))
    assert ratio <= 2 * sc.medium.omega_c / sc.medium.derived.eta * d_rho
    assert ratio < 0.05


@pytest.mark.xfail(strict=True, reason="adiabatic following keeps |rho31| near 1.6e-2 |rho21|, far above 1e-6")
def test_dark_state_protection_strict(rabi):
    _, sc = rabi
    tr = obe.run(static(sc, 1e-6), obe.OBESolverConfig(record_every=100))
    st = tr.info["final_state"]
    assert np.max(np.abs(st.rho31R)) <= 1e-6 * np.max(np.abs(st.rho21))


def test_zero_amplitude_gives_zero_trajectory(rabi):
    _, sc = rabi
    tr = obe.run(modulated(sc, 5e-6), obe.OBESolverConfig(record_every=500, init_amplitude=0.0))
    assert np.all(tr.norm == 0) and np.all(tr.fidelities == 0)
    st = tr.info["final_state"]
    assert not np.any(st.rho21) and not np.any(st.omega_pR)


def test_linearity(rabi):
    _, sc = rabi
    run = modulated(sc, 20e-6, beta=0.3)
    a = obe.run(run, obe.OBESolverConfig(record_every=1000, init_amplitude=0.01))
    b = obe.run(run, obe.OBESolverConfig(record_every=1000, init_amplitude=0.1))
    # relative 1e-9, with a rounding floor for fidelities that are themselves ~0
    assert np.all(np.abs(a.fidelities - b.fidelities) <= 1e-9 * b.fidelities + 1e-14)
    assert np.allclose(b.norm, 100 * a.norm, rtol=1e-9)
    sa, sb = a.info["final_state"], b.info["final_state"]
    assert np.allclose(sb.rho21, 10 * sa.rho21, rtol=1e-9, atol=1e-12 * np.abs(sb.rho21).max())


def test_norm_never_grows_per_step(rabi):
    _, sc = rabi
    tr = obe.run(modulated(sc, 2e-6, beta=0.3), obe.OBESolverConfig(record_every=1))
    n = tr.norm
    assert np.all(n[1:] <= n[:-1] * (1 + 1e-6))


def test_schemes_agree(rabi):
    _, sc = rabi
    run = modulated(sc, 1e-6, beta=0.5)
    ref = obe.run(run, obe.OBESolverConfig(dt=0.05e-9, record_every=20000, atom_scheme="rk4"))
    r = ref.info["final_state"].rho21
    for scheme, dt in (("implicit", 1e-9), ("exponential-splitting", 0.25e-9)):
        st = obe.run(run, obe.OBESolverConfig(dt=dt, record_every=1000, atom_scheme=scheme)).info["final_state"]
        assert np.linalg.norm(st.rho21 - r) / np.linalg.norm(r) < 1e-4


def test_stationarity_and_norm_over_200us(rabi):
    _, sc = rabi
    tr = obe.run(replace(static(sc, 0.2e-3), init_mode=1), obe.OBESolverConfig())
    assert tr.F(1).min() >= 0.99
    assert np.all(np.diff(tr.norm) <= 1e-6 * tr.norm[:-1])


@pytest.mark.xfail(strict=True, reason="the diffusion term is non-Hermitian, so F1 wobbles near 0.995")
def test_ground_mode_static_50us_strict(rabi):
    _, sc = rabi
    tr = obe.run(static(sc, 50e-6), obe.OBESolverConfig(record_every=500))
    assert tr.F(1).min() >= 0.999


def test_excited_mode_static_matches_dsp(rabi):
    # the diffusion term damps higher modes unevenly, so an excited mode is only
    # quasi-stationary; both engines must show the same small fidelity wobble
    _, sc = rabi
    run = replace(static(sc, 50e-6), init_mode=2)
    a = obe.run(run, obe.OBESolverConfig(record_every=1000))
    b = dsp.run(run, dsp.DSPSolverConfig(record_every=100))
    assert np.allclose(a.t, b.t, atol=1e-12)
    assert np.max(np.abs(a.F(2) - b.F(2))) <= 0.03
    assert np.all(np.diff(a.norm) <= 1e-6 * a.norm[:-1])


def test_dt_halving(rabi):
    _, sc = rabi
    run = replace(sc, duration=0.1e-3, snapshot_times=())
    a = obe.run(run, obe.OBESolverConfig(dt=1e-9, record_every=1000))
    b = obe.run(run, obe.OBESolverConfig(dt=0.5e-9, record_every=2000))
    assert np.allclose(a.t, b.t, rtol=0, atol=1e-15)
    assert np.max(np.abs(a.fidelities - b.fidelities)) <= 1e-3


def test_deterministic_and_snapshots(rabi):
    _, sc = rabi
    run = replace(modulated(sc, 3e-6), snapshot_times=(1.5e-6,))
    a = obe.run(run, obe.OBESolverConfig(record_every=500))
    b = obe.run(run, obe.OBESolverConfig(record_every=500))
    assert np.array_equal(a.fidelities, b.fidelities) and np.array_equal(a.norm, b.norm)
    assert np.array_equal(a.snapshots[1.5e-6].values, b.snapshots[1.5e-6].values)
    assert np.allclose(a.t, np.arange(7) * 0.5e-6)
    assert a.info["steps"] == 3000


def test_config_validation(rabi):
    _, sc = rabi
    with pytest.raises(ParameterError):
        obe.run(sc, obe.OBESolverConfig(dt=-1.0))
    with pytest.raises(ParameterError):
        obe.run(sc, obe.OBESolverConfig(atom_scheme="rk4", dt=2e-8))
    with pytest.raises(ParameterError):
        obe.run(sc, obe.OBESolverConfig(atom_scheme="euler"))
    with pytest.raises(ParameterError):
        obe.run(sc, obe.OBESolverConfig(probe_model="retarded"))


def test_divergence_detected(rabi):
    _, sc = rabi
    g = sc.grid
    bad = np.zeros(g.n, complex)
    bad[5] = np.nan
    st = obe.OBEState(0.0, g, bad, bad, bad, bad, bad)
    with pytest.raises(DivergenceError) as err:
        st.check(17)
    assert err.value.step == 17


def test_storage_zero_input(rabi):
    _, sc = rabi
    st, F = obe.prepare_via_storage(obe.WritePulse(np.zeros(sc.grid.n)), sc)
    assert F == 0.0 and not np.any(st.rho21)


def test_storage_fundamental_and_node_bearing(rabi):
    _, sc = rabi
    cat = sc.catalog
    st, F1 = obe.prepare_via_storage(obe.WritePulse(cat.mode(1)), sc)
    assert F1 >= 0.9
    assert np.max(np.abs(st.rho21)) <= 1
    # the stored wave of the first excited mode keeps its sign change
    st2, F2 = obe.prepare_via_storage(obe.WritePulse(cat.mode(2)), sc)
    assert F2 >= 0.8
    psi2 = cat.mode(2)
    left, right = psi2 > 0.5 * psi2.max(), psi2 < 0.5 * psi2.min()
    phase = np.angle(np.mean(st2.rho21[left]) / np.mean(st2.rho21[right]))
    assert abs(abs(phase) - math.pi) < 0.5
