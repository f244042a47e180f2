"""Running scenarios, writing their outputs, engine comparison and convergence studies."""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import dsp, obe
from .analysis import Trajectory, extrema
from .config import ScenarioConfig
from .core import MM, RAD_KHZ
from .eigenmodes import build_hamiltonian, solve_modes

log = logging.getLogger(__name__)

FLOAT = "%.17e"


def _engines(config: ScenarioConfig) -> tuple[str, ...]:
    return ("obe", "dsp") if config.engine == "both" else (config.engine,)


def run_engine(config: ScenarioConfig, engine: str, scenario=None) -> Trajectory:
    scenario = scenario or config.build()
    if engine == "obe":
        return obe.run(scenario, config.obe_config())
    if engine == "dsp":
        return dsp.run(scenario, config.dsp_config())
    raise ValueError(f"unknown engine {engine!r}")


# --- writers ---------------------------------------------------------------------

def write_fidelity_csv(traj: Trajectory, path) -> None:
    header = "t_ms," + ",".join(f"F{m}" for m in traj.modes) + ",norm"
    data = np.column_stack([traj.t / 1e-3, traj.fidelities.T, traj.norm])
    np.savetxt(path, data, fmt=FLOAT, delimiter=",", header=header, comments="")


def write_norm_csv(traj: Trajectory, path) -> None:
    np.savetxt(path, np.column_stack([traj.t / 1e-3, traj.norm]), fmt=FLOAT, delimiter=",",
               header="t_ms,norm", comments="")


def snapshot_name(t: float) -> str:
    return f"snapshot_{t / 1e-6:g}us.csv"


def write_snapshot_csv(field_, path) -> None:
    v = field_.values
    data = np.column_stack([field_.grid.x / MM, v.real, v.imag, np.abs(v) ** 2])
    np.savetxt(path, data, fmt=FLOAT, delimiter=",", header="x_mm,re,im,abs2", comments="")


def trajectory_summary(traj: Trajectory) -> dict:
    out = {
        "engine": traj.info.get("engine"),
        "steps": traj.info.get("steps"),
        "dt_s": traj.info.get("dt"),
        "wall_time_s": traj.info.get("wall_time"),
        "final": {f"F{m}": float(traj.F(m)[-1]) for m in traj.modes} if traj.times else {},
        "extrema": {},
    }
    if len(traj.times) >= 3:
        for m in traj.modes:
            out["extrema"][f"F{m}"] = [
                {"t_ms": t / 1e-3, "value": v, "kind": k} for t, v, k in extrema(traj.t, traj.F(m))
                if abs(v - np.median(traj.F(m))) > 0.05  # drop sub-percent ripple
            ]
    return out


def write_trajectory(traj: Trajectory, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_fidelity_csv(traj, out / "fidelity.csv")
    write_norm_csv(traj, out / "norm.csv")
    for t, f in sorted(traj.snapshots.items()):
        write_snapshot_csv(f, out / snapshot_name(t))


@dataclass
class RunResult:
    out_dir: Path
    trajectories: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def run_scenario(config: ScenarioConfig, out_dir=None) -> RunResult:
    """Run every engine the configuration asks for and write the output bundle.

    Layout: ``fidelity.csv``, ``norm.csv`` and ``snapshot_<t>us.csv`` per
    engine (in ``obe/`` and ``dsp/`` subdirectories when both run),
    ``config.resolved.txt`` and ``summary.json``.
    """
    out = Path(out_dir or config.output_dir or f"runs/{config.name}")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    wall = time.perf_counter()
    scenario = config.build()
    result = RunResult(out)
    cat = scenario.catalog
    summary = {
        "scenario": config.name,
        "grid_n": scenario.grid.n,
        "omega_radkHz": [float(w / RAD_KHZ) for w in cat.omega],
        "engines": {},
    }
    engines = _engines(config)
    for eng in engines:
        traj = run_engine(config, eng, scenario)
        result.trajectories[eng] = traj
        write_trajectory(traj, out / eng if len(engines) > 1 else out)
        summary["engines"][eng] = trajectory_summary(traj)
    if len(engines) > 1:
        summary["comparison"] = compare_trajectories(result.trajectories["obe"], result.trajectories["dsp"])
    summary["wall_time_s"] = time.perf_counter() - wall
    (out / "config.resolved.txt").write_text(config.to_text())
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    result.summary = summary
    return result


# --- comparisons -------------------------------------------------------------------

def _common(a: Trajectory, b: Trajectory, tol: float = 1e-12):
    ta, tb = a.t, b.t
    ib = np.searchsorted(tb, ta - tol)
    ib = np.clip(ib, 0, len(tb) - 1)
    ok = np.abs(tb[ib] - ta) <= tol + 1e-9 * np.abs(ta)
    return np.nonzero(ok)[0], ib[ok]


def compare_trajectories(a: Trajectory, b: Trajectory) -> dict:
    """``max_t |F_n^a - F_n^b|`` per mode over the common sample times."""
    ia, ib = _common(a, b)
    out = {}
    for m in a.modes:
        if m in b.modes:
            d = np.abs(a.F(m)[ia] - b.F(m)[ib])
            out[f"F{m}"] = float(d.max()) if d.size else 0.0
    return out


def compare_engines(config: ScenarioConfig, trajectories: dict | None = None) -> dict:
    """Run both engines on one scenario and report their fidelity deviations."""
    config = replace(config, engine="both")
    scenario = None
    trajectories = dict(trajectories or {})
    for eng in ("obe", "dsp"):
        if eng not in trajectories:
            scenario = scenario or config.build()
            trajectories[eng] = run_engine(config, eng, scenario)
    report = compare_trajectories(trajectories["obe"], trajectories["dsp"])
    report["max"] = max(report.values()) if report else 0.0
    return {"scenario": config.name, "max_deviation": report, "trajectories": trajectories}


def convergence_study(config: ScenarioConfig, factors=(2,), what=("dt", "grid")) -> dict:
    """Refine dt and/or the grid by each factor; report fidelity deviations
    between successive refinements (plus eigenfrequency shifts for the grid)."""
    report = {"scenario": config.name, "dt": {}, "grid": {}}
    for eng in _engines(config):
        if "dt" in what:
            base_dt = config.obe_dt if eng == "obe" else config.dsp_dt
            levels = [1] + list(factors)
            runs = []
            for f in levels:
                key = "obe_dt" if eng == "obe" else "dsp_dt"
                cfg = replace(config, **{key: base_dt / f})
                runs.append(run_engine(cfg, eng))
            devs = [compare_trajectories(runs[i], runs[i + 1]) for i in range(len(runs) - 1)]
            report["dt"][eng] = [
                {"from": base_dt / levels[i], "to": base_dt / levels[i + 1], "max_dF": d}
                for i, d in enumerate(devs)
            ]
        if "grid" in what:
            base = run_engine(config, eng)
            entries = []
            for f in factors:
                cfg = replace(config, grid_n=(config.grid_n - 1) * f + 1)
                entries.append({"n": cfg.grid_n, "max_dF": compare_trajectories(base, run_engine(cfg, eng))})
            report["grid"][eng] = entries
    if "grid" in what:
        report["omega"] = eigenfrequency_convergence(config, factors)
    return report


def eigenfrequency_convergence(config: ScenarioConfig, factors=(2,), k: int = 3) -> list[dict]:
    rows = []
    base = None
    for f in [1] + list(factors):
        n = (config.grid_n - 1) * f + 1
        cfg = replace(config, grid_n=n)
        sc = cfg.build()
        cat = solve_modes(build_hamiltonian(sc.grid, config.medium.derived.m_reduced, sc.potential.u), k)
        w = cat.omega
        if base is None:
            base = w
        rows.append({"n": n, "omega_radkHz": [float(v / RAD_KHZ) for v in w],
                     "rel_shift": [float(abs(v - b) / b) for v, b in zip(w, base)]})
    return rows
