import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GAMMA
from dsmlab import GaussianPulses, Sinusoidal, load_config, parse_config, preset
from dsmlab.config import parse_lines, parse_quantity, resolve
from dsmlab.core import MM
from dsmlab.errors import ConfigError


def test_preset_values():
    r = preset("rabi")
    assert r.medium.delta_p == pytest.approx(4.6 * GAMMA, rel=1e-15)
    assert r.medium.gamma_e == pytest.approx(2 * math.pi * 5.2e6, rel=1e-15)
    assert r.medium.gamma_d == pytest.approx(1e-3 * GAMMA, rel=1e-15)
    assert r.medium.optical_depth == 800 and r.medium.length == pytest.approx(8 * MM)
    assert r.medium.omega_c == pytest.approx(1.5 * GAMMA)
    assert r.potential.c1 == pytest.approx(3.06e-3 * GAMMA)
    assert r.potential.alpha == pytest.approx(math.sqrt(1.8)) and r.potential.lambda_f == 2.89
    assert r.potential.phi == 3.14
    v = r.schedule.variant
    assert isinstance(v, Sinusoidal) and v.beta == 0.07
    assert v.nu == pytest.approx(376.4e3) and v.t_start == pytest.approx(0.06e-3)
    assert r.duration == pytest.approx(0.3e-3)

    s = preset("stirap-seq")
    v = s.schedule.variant
    assert isinstance(v, GaussianPulses) and len(v.pulses) == 2
    assert [p.nu for p in v.pulses] == pytest.approx([490e3, 684e3])
    assert [p.epsilon for p in v.pulses] == pytest.approx([0.85e-3, 1.15e-3])
    assert all(p.beta == 0.055 and p.tau == pytest.approx(0.3e-3) for p in v.pulses)
    assert s.medium.length == pytest.approx(20 * MM) and s.medium.omega_c == pytest.approx(2 * GAMMA)
    assert s.potential.alpha**2 == pytest.approx(40) and s.potential.phi == 6
    assert s.duration == pytest.approx(2e-3)
    assert 1.0e-3 in s.snapshot_times and 1.03e-3 in s.snapshot_times

    d = preset("stirap-deg")
    (p,) = d.schedule.variant.pulses
    assert p.tau == pytest.approx(0.15e-3) and p.beta == 0.212 and p.nu == pytest.approx(1442e3)
    assert p.epsilon == pytest.approx(0.5e-3) and d.duration == pytest.approx(1e-3)
    assert d.potential.alpha**2 == pytest.approx(50) and d.potential.phi == 6.25

    with pytest.raises(ConfigError):
        preset("rabbi")


@pytest.mark.parametrize("name", ["rabi", "stirap-seq", "stirap-deg"])
def test_resolved_text_round_trip(name, tmp_path):
    cfg = preset(name)
    assert parse_config(cfg.to_text()) == cfg
    path = tmp_path / "cfg.txt"
    path.write_text(cfg.to_text())
    assert resolve(str(path)) == cfg


@settings(max_examples=40, deadline=None)
@given(st.floats(1e5, 1e9), st.floats(0, 1e6), st.floats(-1e9, 1e9).filter(lambda v: abs(v) > 1),
       st.floats(1, 1e4), st.floats(1e-4, 1.0), st.floats(1e5, 1e9), st.floats(-0.9, 0.9),
       st.integers(16, 4096), st.sampled_from(["obe", "dsp", "both"]))
def test_round_trip_property(ge, gd, dp, od, L, oc, beta, n, engine):
    base = preset("rabi")
    from dsmlab import MediumParams, ScheduleSpec
    med = MediumParams(ge, gd, dp, od, L, oc)
    cfg = replace(base, medium=med, schedule=ScheduleSpec(Sinusoidal(beta, 1e5, 1e-5), oc), grid_n=n,
                  engine=engine, snapshot_times=(0.1e-3, 1 / 3 * 1e-4))
    assert parse_config(cfg.to_text()) == cfg


def test_units():
    assert parse_quantity("4.6 Gamma", GAMMA) == pytest.approx(4.6 * GAMMA, rel=1e-15)
    assert parse_quantity("5.2 MHz_x2pi") == pytest.approx(2 * math.pi * 5.2e6)
    assert parse_quantity("376.4 radkHz") == pytest.approx(376.4e3)
    assert parse_quantity("8 mm") == pytest.approx(8e-3)
    assert parse_quantity("0.3 ms") == pytest.approx(3e-4)
    assert parse_quantity("250 us") == pytest.approx(2.5e-4)
    assert parse_quantity("10 ns") == pytest.approx(1e-8)
    assert parse_quantity("1.5e-3") == 1.5e-3
    for bad in ("3 parsecs", "abc", "1 2 3"):
        with pytest.raises(ConfigError):
            parse_quantity(bad, GAMMA)
    with pytest.raises(ConfigError):
        parse_quantity("1 Gamma")


def test_line_format():
    e = parse_lines("# header\n a.b = 1  # trailing\n\nc = x y\n")
    assert e == {"a.b": "1", "c": "x y"}
    with pytest.raises(ConfigError):
        parse_lines("a = 1\na = 2\n")
    with pytest.raises(ConfigError):
        parse_lines("just words\n")


MINIMAL = """
medium.gamma_e = 5.2 MHz_x2pi
medium.delta_p = 4.6 Gamma
medium.optical_depth = 800
medium.length = 8 mm
medium.omega_c = 1.5 Gamma
potential.c1 = 3.06e-3 Gamma
potential.alpha = 1.2 mm
potential.lambda_f = 2.89 mm
duration = 10 us
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.schedule.kind == "static" and cfg.engine == "obe"
    assert cfg.potential.alpha == 1.2 and cfg.grid_n == 1024
    assert cfg.grid.x_min == pytest.approx(-4e-3) and cfg.obe_config().record_every == 1000
    assert cfg.dsp_config().record_every == 100


@pytest.mark.parametrize("extra", [
    "bogus.key = 1",
    "engine = warp",
    "schedule.kind = square",
    "schedule.kind = sinusoidal\nschedule.beta = 1.5\nschedule.nu = 1 radkHz",
    "schedule.kind = gaussian",
    "potential.alpha_sq = 2",
    "grid.n = 8",
    "solver.obe.scheme = leapfrog",
    "output.snapshot_times = 20 us",
    "solver.record_interval = 1.5 ns",
    "grid.auto_span = maybe",
])
def test_rejections(extra):
    with pytest.raises(ConfigError):
        cfg = parse_config(MINIMAL + extra + "\n")
        cfg.build()


def test_missing_required_key():
    text = "\n".join(line for line in MINIMAL.splitlines() if not line.startswith("medium.length"))
    with pytest.raises(ConfigError, match="medium.length"):
        parse_config(text)
    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace("4.6 Gamma", "0"))


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.txt")
