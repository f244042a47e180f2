"""Command-line entry point: ``dsmlab {modes,simulate,compare,converge,schedule}``.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import PRESETS, resolve
from .core import RAD_KHZ
from .eigenmodes import build_hamiltonian, solve_modes, write_catalog
from .errors import ConfigError, NumericError, ParameterError, WeakProbeError, GridMismatchError
from .experiments import compare_engines, convergence_study, run_scenario
from .schedules import ax_reduced, control_pair, modulation_signal

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _load(args):
    cfg = resolve(args.scenario)
    kw = {}
    if getattr(args, "grid_n", None):
        kw["grid_n"] = args.grid_n
    if getattr(args, "engine", None):
        kw["engine"] = args.engine
    if getattr(args, "dt_ns", None):
        eng = kw.get("engine", cfg.engine)
        kw["dsp_dt" if eng == "dsp" else "obe_dt"] = args.dt_ns * 1e-9
    if getattr(args, "dsp_dt_ns", None):
        kw["dsp_dt"] = args.dsp_dt_ns * 1e-9
    if getattr(args, "out", None):
        kw["output_dir"] = args.out
    try:
        return replace(cfg, **kw) if kw else cfg
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_modes(args) -> None:
    cfg = _load(args)
    sc = cfg.build()
    cat = solve_modes(build_hamiltonian(sc.grid, cfg.medium.derived.m_reduced, sc.potential.u), args.k)
    out = Path(args.out or f"{cfg.name}_modes.txt")
    write_catalog(cat, out)
    for i, w in enumerate(cat.omega, 1):
        print(f"omega_{i} = {w / RAD_KHZ:.3f} rad kHz")
    print(f"catalog written to {out}")


def cmd_simulate(args) -> None:
    cfg = _load(args)
    res = run_scenario(cfg)
    print(json.dumps({k: v for k, v in res.summary.items() if k != "engines"}, indent=2))
    print(f"outputs in {res.out_dir}")


def cmd_compare(args) -> None:
    cfg = _load(args)
    rep = compare_engines(cfg)
    out = Path(cfg.output_dir or f"runs/{cfg.name}")
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps({"scenario": rep["scenario"], "max_deviation": rep["max_deviation"]}, indent=2)
    (out / "compare.json").write_text(text)
    print(text)


def cmd_converge(args) -> None:
    cfg = _load(args)
    factors = tuple(int(f) for f in args.factors.split(","))
    rep = convergence_study(cfg, factors, tuple(args.what.split(",")))
    out = Path(cfg.output_dir or f"runs/{cfg.name}")
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(rep, indent=2)
    (out / "converge.json").write_text(text)
    print(text)


def cmd_schedule(args) -> None:
    cfg = _load(args)
    if not args.dump:
        raise ConfigError("schedule: nothing to do (use --dump)")
    t = np.linspace(0.0, cfg.duration, args.samples)
    s = modulation_signal(cfg.schedule, t)
    cR, cL = control_pair(cfg.schedule, t)
    d = cfg.medium.derived
    ax = ax_reduced(cfg.schedule, d.eta, cfg.medium.delta_p, t)
    data = np.column_stack([t / 1e-3, s, cR, cL, ax])
    target = args.out or sys.stdout
    np.savetxt(target, data, fmt="%.17e", delimiter=",", header="t_ms,s,omega_cR,omega_cL,a_x", comments="")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dsmlab", description="Dark-state spatial mode simulations")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, engine=True):
        p.add_argument("--scenario", required=True, help=f"preset ({', '.join(PRESETS)}) or config file")
        p.add_argument("--grid-n", type=int)
        p.add_argument("--out")
        if engine:
            p.add_argument("--engine", choices=("obe", "dsp", "both"))
            p.add_argument("--dt-ns", type=float, help="time step of the selected engine (OBE when both)")
            p.add_argument("--dsp-dt-ns", type=float)

    p = sub.add_parser("modes", help="solve and write the eigenmode catalog")
    common(p, engine=False)
    p.add_argument("-k", type=int, default=3)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("simulate", help="run a scenario and write CSV outputs")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="run both engines and report fidelity deviations")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("converge", help="dt / grid refinement study")
    common(p)
    p.add_argument("--factors", default="2")
    p.add_argument("--what", default="dt,grid")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("schedule", help="inspect the control-field schedule")
    common(p, engine=False)
    p.add_argument("--dump", action="store_true", help="write t, s, OmegaR, OmegaL, a_x as CSV")
    p.add_argument("--samples", type=int, default=2001)
    p.set_defaults(func=cmd_schedule)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        args.func(args)
    except (ConfigError, ParameterError, GridMismatchError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, WeakProbeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
