"""Scenario configuration: presets, the key=value text format and its units.

A configuration file is a flat list of ``section.key = value`` lines; ``#``
starts a comment.  Values may carry one unit suffix:

    Gamma      multiples of medium.gamma_e (for c1: Gamma per mm^2)
    MHz_x2pi   2*pi x MHz
    radkHz     1e3 rad/s
    mm, ms, us, ns

Unsuffixed numbers are SI (lengths of the potential are in mm, c1 in
rad s^-1 mm^-2).  :meth:`ScenarioConfig.to_text` writes plain SI numbers at
full precision, so an echoed file reloads to an identical configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .core import MM, MS, NS, RAD_KHZ, US, MediumParams, SpatialGrid, mhz_x2pi
from .dsp import DSPSolverConfig
from .errors import ConfigError, DSMError
from .obe import SCHEMES, OBESolverConfig
from .potentials import FluxoniumParams, fluxonium
from .scenario import Scenario
from .schedules import GaussianPulse, GaussianPulses, ScheduleSpec, Sinusoidal, Static

ENGINES = ("obe", "dsp", "both")
PRESETS = ("rabi", "stirap-seq", "stirap-deg")

_SCALE = {"mm": MM, "ms": MS, "us": US, "ns": NS, "radkHz": RAD_KHZ}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    medium: MediumParams
    potential: FluxoniumParams
    schedule: ScheduleSpec
    duration: float
    grid_n: int = 1024
    grid_auto_span: bool = True
    grid_x_min: float = 0.0
    grid_x_max: float = 0.0
    engine: str = "obe"
    init_mode: int = 1
    recorded_modes: tuple[int, ...] = (1, 2, 3)
    record_interval: float = 1e-6
    obe_dt: float = 1e-9
    obe_scheme: str = "implicit"
    init_amplitude: float = 0.05
    dsp_dt: float = 10e-9
    dsp_diffusion: bool = True
    include_ax_correction: bool = False
    ax_rms: float = 0.0
    snapshot_times: tuple[float, ...] = ()
    output_dir: str = ""

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.obe_scheme not in SCHEMES:
            raise ConfigError(f"solver.obe.scheme must be one of {SCHEMES}, got {self.obe_scheme!r}")
        if not self.duration > 0:
            raise ConfigError("duration must be positive")
        for name in ("obe_dt", "dsp_dt", "record_interval"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("obe_dt", "dsp_dt"):
            ratio = self.record_interval / getattr(self, name)
            if ratio < 1 - 1e-9 or abs(ratio - round(ratio)) > 1e-6 * ratio:
                raise ConfigError(f"record interval must be a whole multiple of {name}")
        if self.init_mode < 1 or any(m < 1 for m in self.recorded_modes) or not self.recorded_modes:
            raise ConfigError("mode indices start at 1")
        if any(t < 0 or t > self.duration * (1 + 1e-12) for t in self.snapshot_times):
            raise ConfigError("snapshot times must lie within [0, duration]")
        if not self.grid_auto_span and not self.grid_x_max > self.grid_x_min:
            raise ConfigError("explicit grid needs x_max > x_min")
        object.__setattr__(self, "recorded_modes", tuple(int(m) for m in self.recorded_modes))
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))

    # --- derived objects -------------------------------------------------
    @property
    def grid(self) -> SpatialGrid:
        try:
            if self.grid_auto_span:
                return SpatialGrid.spanning(self.medium.length, self.grid_n)
            return SpatialGrid(self.grid_x_min, self.grid_x_max, self.grid_n)
        except DSMError as exc:
            raise ConfigError(str(exc)) from exc

    def obe_config(self) -> OBESolverConfig:
        return OBESolverConfig(
            dt=self.obe_dt,
            record_every=int(round(self.record_interval / self.obe_dt)),
            atom_scheme=self.obe_scheme,
            init_amplitude=self.init_amplitude,
        )

    def dsp_config(self) -> DSPSolverConfig:
        return DSPSolverConfig(
            dt=self.dsp_dt,
            record_every=int(round(self.record_interval / self.dsp_dt)),
            diffusion=self.dsp_diffusion,
            init_amplitude=self.init_amplitude,
        )

    def build(self) -> Scenario:
        grid = self.grid
        profile = fluxonium(self.potential, grid, self.medium.gamma_d)
        try:
            return Scenario(
                medium=self.medium, grid=grid, potential=profile, schedule=self.schedule,
                duration=self.duration, init_mode=self.init_mode, recorded_modes=self.recorded_modes,
                snapshot_times=self.snapshot_times, include_ax_correction=self.include_ax_correction,
                ax_rms=self.ax_rms,
            )
        except DSMError as exc:
            raise ConfigError(f"scenario {self.name!r}: {exc}") from exc

    def with_overrides(self, **kw) -> ScenarioConfig:
        return replace(self, **kw)

    # --- text form ------------------------------------------------------
    def to_text(self) -> str:
        m, p, s = self.medium, self.potential, self.schedule
        rows = [
            ("scenario.name", self.name),
            ("medium.gamma_e", m.gamma_e),
            ("medium.gamma_d", m.gamma_d),
            ("medium.delta_p", m.delta_p),
            ("medium.optical_depth", m.optical_depth),
            ("medium.length", m.length),
            ("medium.omega_c", m.omega_c),
            ("potential.c1", p.c1),
            ("potential.alpha", p.alpha),
            ("potential.lambda_f", p.lambda_f),
            ("potential.phi", p.phi),
            ("potential.include_ax_correction", self.include_ax_correction),
            ("potential.ax_rms", self.ax_rms),
            ("grid.n", self.grid_n),
            ("grid.auto_span", self.grid_auto_span),
        ]
        if not self.grid_auto_span:
            rows += [("grid.x_min", self.grid_x_min), ("grid.x_max", self.grid_x_max)]
        rows.append(("schedule.kind", s.kind))
        v = s.variant
        if isinstance(v, Sinusoidal):
            rows += [("schedule.beta", v.beta), ("schedule.nu", v.nu), ("schedule.t_start", v.t_start)]
        elif isinstance(v, GaussianPulses):
            for j, pulse in enumerate(v.pulses, 1):
                for key in ("beta", "nu", "epsilon", "tau"):
                    rows.append((f"schedule.pulse{j}.{key}", getattr(pulse, key)))
        rows += [
            ("engine", self.engine),
            ("duration", self.duration),
            ("init.mode", self.init_mode),
            ("init.amplitude", self.init_amplitude),
            ("modes.record", ",".join(str(i) for i in self.recorded_modes)),
            ("solver.record_interval", self.record_interval),
            ("solver.obe.dt", self.obe_dt),
            ("solver.obe.scheme", self.obe_scheme),
            ("solver.dsp.dt", self.dsp_dt),
            ("solver.dsp.diffusion", self.dsp_diffusion),
            ("output.dir", self.output_dir),
            ("output.snapshot_times", ",".join(repr(t) for t in self.snapshot_times)),
        ]
        out = []
        for key, val in rows:
            if isinstance(val, bool):
                val = "true" if val else "false"
            elif isinstance(val, float):
                val = repr(val)
            out.append(f"{key} = {val}")
        return "\n".join(out) + "\n"


# --- parsing -----------------------------------------------------------------

def parse_lines(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = val
    return entries


def parse_quantity(text: str, gamma: float | None = None) -> float:
    """Convert ``'4.6 Gamma'``, ``'8 mm'``, ``'376.4 radkHz'``... to SI."""
    parts = text.split()
    if len(parts) not in (1, 2):
        raise ConfigError(f"cannot parse quantity {text!r}")
    try:
        num = float(parts[0])
    except ValueError:
        raise ConfigError(f"not a number: {parts[0]!r}") from None
    if len(parts) == 1:
        return num
    unit = parts[1]
    if unit == "Gamma":
        if gamma is None:
            raise ConfigError("'Gamma' units need medium.gamma_e to be set first")
        return num * gamma
    if unit == "MHz_x2pi":
        return mhz_x2pi(num)
    if unit in _SCALE:
        return num * _SCALE[unit]
    raise ConfigError(f"unknown unit {unit!r} in {text!r}")


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def from_entries(entries: dict[str, str]) -> ScenarioConfig:
    e = dict(entries)
    used: set[str] = set()

    def take(key, default=None, required=False):
        if key in e:
            used.add(key)
            return e[key]
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default

    def qty(key, default=None, required=False):
        raw = take(key, None, required)
        return default if raw is None else parse_quantity(raw, gamma)

    # a potential length written with a unit must come back in mm
    def mm_qty(key, default=None):
        raw = take(key)
        if raw is None:
            return default
        parts = raw.split()
        if len(parts) == 2 and parts[1] == "mm":
            return float(parts[0])
        return parse_quantity(raw, gamma)

    gamma = None
    gamma = qty("medium.gamma_e", required=True)
    try:
        medium = MediumParams(
            gamma_e=gamma,
            gamma_d=qty("medium.gamma_d", 0.0),
            delta_p=qty("medium.delta_p", required=True),
            optical_depth=qty("medium.optical_depth", required=True),
            length=qty("medium.length", required=True),
            omega_c=qty("medium.omega_c", required=True),
        )
        alpha = mm_qty("potential.alpha")
        alpha_sq = take("potential.alpha_sq")
        if alpha_sq is not None:
            if alpha is not None:
                raise ConfigError("give potential.alpha or potential.alpha_sq, not both")
            alpha = math.sqrt(float(alpha_sq.split()[0]))
        potential = FluxoniumParams(
            c1=qty("potential.c1", required=True),
            alpha=alpha if alpha is not None else 0.0,
            lambda_f=mm_qty("potential.lambda_f", 1.0),
            phi=qty("potential.phi", 0.0),
        )
        kind = take("schedule.kind", "static")
        if kind == "static":
            variant = Static()
        elif kind == "sinusoidal":
            variant = Sinusoidal(qty("schedule.beta", required=True), qty("schedule.nu", required=True),
                                 qty("schedule.t_start", 0.0))
        elif kind == "gaussian":
            idx = sorted({int(k.split(".")[1][5:]) for k in e if k.startswith("schedule.pulse")})
            if not idx:
                raise ConfigError("gaussian schedule needs schedule.pulse1.* entries")
            variant = GaussianPulses(tuple(
                GaussianPulse(*(qty(f"schedule.pulse{j}.{f}", required=True) for f in ("beta", "nu", "epsilon", "tau")))
                for j in idx
            ))
        else:
            raise ConfigError(f"unknown schedule.kind {kind!r}")
        schedule = ScheduleSpec(variant, medium.omega_c)
    except ConfigError:
        raise
    except (DSMError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    modes_raw = take("modes.record", "1,2,3")
    snaps_raw = take("output.snapshot_times", "")
    try:
        cfg = ScenarioConfig(
            name=take("scenario.name", "custom"),
            medium=medium,
            potential=potential,
            schedule=schedule,
            duration=qty("duration", required=True),
            grid_n=int(take("grid.n", "1024")),
            grid_auto_span=_bool(take("grid.auto_span", "true")),
            grid_x_min=qty("grid.x_min", 0.0),
            grid_x_max=qty("grid.x_max", 0.0),
            engine=take("engine", "obe"),
            init_mode=int(take("init.mode", "1")),
            init_amplitude=float(take("init.amplitude", "0.05")),
            recorded_modes=tuple(int(m) for m in modes_raw.split(",") if m.strip()),
            record_interval=qty("solver.record_interval", 1e-6),
            obe_dt=qty("solver.obe.dt", 1e-9),
            obe_scheme=take("solver.obe.scheme", "implicit"),
            dsp_dt=qty("solver.dsp.dt", 10e-9),
            dsp_diffusion=_bool(take("solver.dsp.diffusion", "true")),
            include_ax_correction=_bool(take("potential.include_ax_correction", "false")),
            ax_rms=qty("potential.ax_rms", 0.0),
            snapshot_times=tuple(parse_quantity(t.strip(), gamma) for t in snaps_raw.split(",") if t.strip()),
            output_dir=take("output.dir", ""),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    unknown = sorted(set(e) - used)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    return cfg


def parse_config(text: str) -> ScenarioConfig:
    return from_entries(parse_lines(text))


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return parse_config(text)


# --- presets -------------------------------------------------------------------

GAMMA = mhz_x2pi(5.2)

_COMMON = """
medium.gamma_e = 5.2 MHz_x2pi
medium.delta_p = 4.6 Gamma
medium.gamma_d = 1e-3 Gamma
medium.optical_depth = 800
engine = obe
init.mode = 1
"""

_PRESET_TEXT = {
    "rabi": """
scenario.name = rabi
medium.length = 8 mm
medium.omega_c = 1.5 Gamma
potential.c1 = 3.06e-3 Gamma
potential.alpha_sq = 1.8
potential.lambda_f = 2.89 mm
potential.phi = 3.14
schedule.kind = sinusoidal
schedule.beta = 0.07
schedule.nu = 376.4 radkHz
schedule.t_start = 0.06 ms
duration = 0.3 ms
output.snapshot_times = 0.06 ms, 0.15 ms, 0.21 ms
""",
    "stirap-seq": """
scenario.name = stirap-seq
medium.length = 20 mm
medium.omega_c = 2 Gamma
potential.c1 = 6.12e-4 Gamma
potential.alpha_sq = 40
potential.lambda_f = 11.56 mm
potential.phi = 6
schedule.kind = gaussian
schedule.pulse1.beta = 0.055
schedule.pulse1.nu = 490 radkHz
schedule.pulse1.epsilon = 0.85 ms
schedule.pulse1.tau = 0.3 ms
schedule.pulse2.beta = 0.055
schedule.pulse2.nu = 684 radkHz
schedule.pulse2.epsilon = 1.15 ms
schedule.pulse2.tau = 0.3 ms
duration = 2 ms
output.snapshot_times = 0.1 ms, 1.0 ms, 1.03 ms, 1.9 ms
""",
    "stirap-deg": """
scenario.name = stirap-deg
medium.length = 20 mm
medium.omega_c = 2 Gamma
potential.c1 = 6.12e-4 Gamma
potential.alpha_sq = 50
potential.lambda_f = 11.56 mm
potential.phi = 6.25
schedule.kind = gaussian
schedule.pulse1.beta = 0.212
schedule.pulse1.nu = 1442 radkHz
schedule.pulse1.epsilon = 0.5 ms
schedule.pulse1.tau = 0.15 ms
duration = 1 ms
output.snapshot_times = 0.1 ms, 0.5 ms, 0.9 ms
""",
}


def preset(name: str) -> ScenarioConfig:
    if name not in _PRESET_TEXT:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    cfg = parse_config(_COMMON + _PRESET_TEXT[name])
    return replace(cfg, output_dir=f"runs/{name}")


def resolve(scenario: str) -> ScenarioConfig:
    """Preset name or path to a configuration file."""
    if scenario in _PRESET_TEXT:
        return preset(scenario)
    return load_config(scenario)
