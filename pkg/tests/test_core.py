import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superarrivals.core import (
    CONFIG_KEYS,
    build_config,
    default_config,
    format_config,
    load_config,
    packet_energy,
    parse_config,
    validate,
)
from superarrivals.errors import ConfigError


def test_default_config_values():
    cfg = default_config()
    assert cfg.x0 == 1.2
    assert cfg.sigma0 == pytest.approx(0.05 / math.sqrt(2))
    assert cfg.p0 == pytest.approx(50 * math.pi)
    assert cfg.x_prime == pytest.approx(1.125, abs=1e-12)
    assert cfg.grid.dt == pytest.approx(8e-4 / 400)
    assert cfg.barrier.t_p == 8e-4
    assert cfg.barrier.x_c == 1.5 and cfg.barrier.width == 0.064
    assert cfg.barrier.V0 == pytest.approx(2 * packet_energy(cfg))
    assert cfg.units.hbar == 1.0 and cfg.mass == 0.5
    assert cfg.grid.n_points == 6001 and cfg.grid.dx == pytest.approx(5e-4)
    assert cfg.total_time == pytest.approx(cfg.grid.dt * cfg.grid.n_steps)
    assert cfg.detector_D == pytest.approx(0.343)


def test_packet_energy_values():
    assert packet_energy(p0=50 * math.pi, sigma0=0.05 / math.sqrt(2)) == pytest.approx(
        24874.01, abs=0.01
    )
    assert packet_energy(p0=0.0, sigma0=0.5) == 1.0
    assert packet_energy(p0=1.0, sigma0=1e6) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ConfigError):
        packet_energy(p0=1.0, sigma0=0.0)


@given(
    p=st.floats(0.0, 1e3),
    dp=st.floats(1e-3, 10.0),
    s=st.floats(1e-3, 10.0),
    ds=st.floats(1e-3, 10.0),
)
def test_packet_energy_monotone(p, dp, s, ds):
    assert packet_energy(p0=p + dp, sigma0=s) > packet_energy(p0=p, sigma0=s)
    assert packet_energy(p0=p, sigma0=s + ds) < packet_energy(p0=p, sigma0=s)


def test_validate_default_ok():
    assert validate(default_config()) == []


def test_validate_ordering_violation():
    problems = validate(default_config().replace(x_prime=1.3))
    assert any("ordering x_prime < x0" in p for p in problems)


def test_validate_resolution_violation():
    cfg = build_config(n_points=301)
    assert cfg.grid.dx == pytest.approx(0.01)
    problems = validate(cfg)
    assert any("p0·dx = 1.57 ≥ 0.1" in p for p in problems)


def test_validate_reports_all_violations():
    cfg = build_config(n_points=301, x_prime=1.3, x_min=1.0)
    problems = validate(cfg)
    assert len(problems) >= 3
    assert any("wall" in p for p in problems)


def test_grid_coordinates_bit_reproducible():
    g = default_config().grid
    idx = np.arange(g.n_points)
    a = g.x(idx)
    b = g.x(idx)
    assert np.array_equal(a, b)
    assert np.array_equal(a, g.coordinates())
    assert g.x(g.n_points - 1) == pytest.approx(g.x_max, abs=1e-12)


def test_parse_config_round_trip(tmp_path):
    cfg = default_config().perturbed(10)
    path = tmp_path / "run.cfg"
    path.write_text(format_config(cfg))
    assert load_config(path) == cfg


def test_parse_config_literals():
    params = parse_config("barrier_height = 2E\nx_prime = auto\n# comment\n\nramp_steps = 2\n")
    cfg = build_config(params)
    assert cfg.barrier.mode == "ramp_down"
    assert cfg.barrier.epsilon == pytest.approx(4e-6)
    assert cfg.barrier.V0 == pytest.approx(2 * packet_energy(cfg))


def test_parse_config_unknown_key_has_line_number():
    with pytest.raises(ConfigError) as err:
        parse_config("x0 = 1.2\nbogus = 3\n")
    assert err.value.line == 2
    assert "line 2" in str(err.value)


def test_parse_config_bad_value():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("dt = fast\n")


def test_epsilon_must_match_ramp_steps():
    with pytest.raises(ConfigError, match="epsilon"):
        build_config(ramp_steps=2, epsilon=1e-4)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="config not found"):
        load_config(tmp_path / "nope.cfg")


def test_config_keys_exact():
    assert set(CONFIG_KEYS) == {
        "x0", "sigma0", "p0", "barrier_center", "barrier_width", "barrier_height",
        "x_prime", "t_p", "epsilon", "ramp_steps", "dt", "n_steps", "x_min", "x_max",
        "n_points", "detector_D", "mass",
    }


def test_sweep_keeps_2E_rule():
    cfg = build_config(p0=40 * math.pi)
    assert cfg.barrier.V0 == pytest.approx(2 * packet_energy(p0=40 * math.pi, sigma0=cfg.sigma0))


def test_d_conventions():
    assert build_config(detector_D="edge").detector_D == pytest.approx(0.343)
    assert build_config(detector_D="center").detector_D == pytest.approx(0.375)
