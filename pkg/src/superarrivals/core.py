"""Configuration, grid and unit conventions.

Units are hbar = 1 with the particle mass defaulting to 1/2, so the kinetic
prefactor hbar^2 / 2m is 1 and the group velocity of a packet with mean
momentum p0 is 2 * p0.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .potential import BarrierSchedule

HBAR = 1.0

# Resolution heuristic: phase advance per grid cell of the carrier wave.
MAX_PHASE_PER_CELL = 0.1
# Initial density at the box walls, relative to the peak.
MAX_WALL_DENSITY = 1e-12


@dataclass(frozen=True)
class UnitsNote:
    hbar: float = HBAR
    mass: float = 0.5

    @property
    def kinetic_factor(self) -> float:
        """hbar^2 / 2m, the coefficient of -d^2/dx^2 in the Hamiltonian."""
        return self.hbar**2 / (2.0 * self.mass)


@dataclass(frozen=True)
class Grid:
    """Uniform spatial grid plus a fixed time step."""

    x_min: float
    x_max: float
    n_points: int
    dt: float
    n_steps: int

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def total_time(self) -> float:
        return self.dt * self.n_steps

    def x(self, i):
        """Coordinate of sample ``i``, always recomputed from the index."""
        return self.x_min + np.asarray(i) * self.dx

    def coordinates(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_points) * self.dx

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def index_of(self, x: float) -> int:
        """Nearest grid index to position ``x``."""
        return int(round((x - self.x_min) / self.dx))


@dataclass(frozen=True)
class SimulationConfig:
    grid: Grid
    x0: float
    sigma0: float
    p0: float
    barrier: BarrierSchedule
    x_prime: float
    detector_D: float
    units: UnitsNote = field(default_factory=UnitsNote)

    @property
    def total_time(self) -> float:
        return self.grid.total_time

    @property
    def mass(self) -> float:
        return self.units.mass

    @property
    def group_velocity(self) -> float:
        return self.p0 / self.mass

    def replace(self, **changes) -> SimulationConfig:
        return dataclasses.replace(self, **changes)

    def with_schedule(self, **changes) -> SimulationConfig:
        return self.replace(barrier=dataclasses.replace(self.barrier, **changes))

    def static(self) -> SimulationConfig:
        return self.with_schedule(mode="static")

    def perturbed(self, ramp_steps: int, t_p: float | None = None) -> SimulationConfig:
        """Same run with the barrier switched off over ``ramp_steps`` solver steps."""
        return self.with_schedule(
            mode="ramp_down",
            ramp_steps=ramp_steps,
            epsilon=ramp_steps * self.grid.dt,
            t_p=self.barrier.t_p if t_p is None else t_p,
        )


def packet_energy(config=None, *, p0=None, sigma0=None) -> float:
    """Mean energy of the initial Gaussian packet, p0^2 + 1/(4 sigma0^2).

    Accepts either a config or explicit ``p0``/``sigma0`` keywords.
    """
    if config is not None:
        p0 = config.p0 if p0 is None else p0
        sigma0 = config.sigma0 if sigma0 is None else sigma0
    if sigma0 is None or p0 is None:
        raise TypeError("packet_energy needs a config or both p0 and sigma0")
    if not sigma0 > 0:
        raise ConfigError(f"sigma0 must be positive, got {sigma0}")
    return p0**2 + 1.0 / (4.0 * sigma0**2)


def auto_x_prime(x0: float, sigma0: float) -> float:
    return x0 - 3.0 * sigma0 / math.sqrt(2.0)


def detector_distance(convention: str, barrier: BarrierSchedule, x_prime: float) -> float:
    """Barrier-to-detector distance under the ``edge`` or ``center`` convention."""
    if convention == "edge":
        return barrier.left_edge - x_prime
    if convention == "center":
        return barrier.x_c - x_prime
    raise ConfigError(f"unknown D convention {convention!r} (expected edge or center)")


# Raw parameter set of the canonical run. Values are either numbers or the
# literals "2E" / "auto" / "edge" / "center" resolved by build_config.
DEFAULTS: dict[str, object] = {
    "x0": 1.2,
    "sigma0": 0.05 / math.sqrt(2.0),
    "p0": 50.0 * math.pi,
    "barrier_center": 1.5,
    "barrier_width": 0.064,
    "barrier_height": "2E",
    "x_prime": "auto",
    "t_p": 8e-4,
    "epsilon": "auto",
    "ramp_steps": 0,
    "dt": 2e-6,
    "n_steps": 1750,
    "x_min": 0.0,
    "x_max": 3.0,
    "n_points": 6001,
    "detector_D": "edge",
    "mass": 0.5,
}

CONFIG_KEYS = tuple(DEFAULTS)
_INT_KEYS = {"ramp_steps", "n_steps", "n_points"}
_LITERALS = {
    "barrier_height": ("2E",),
    "x_prime": ("auto",),
    "epsilon": ("auto",),
    "detector_D": ("edge", "center"),
}


def build_config(params: dict | None = None, **overrides) -> SimulationConfig:
    """Build a config from raw parameters, resolving the symbolic literals.

    ``ramp_steps = 0`` selects a static barrier. ``barrier_height = "2E"``
    ties the barrier to the packet's mean energy, so sweeps over p0 or sigma0
    keep the same height criterion.
    """
    raw = dict(DEFAULTS)
    raw.update(params or {})
    raw.update(overrides)
    unknown = set(raw) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

    grid = Grid(
        x_min=float(raw["x_min"]),
        x_max=float(raw["x_max"]),
        n_points=int(raw["n_points"]),
        dt=float(raw["dt"]),
        n_steps=int(raw["n_steps"]),
    )
    x0, sigma0, p0 = float(raw["x0"]), float(raw["sigma0"]), float(raw["p0"])
    if not sigma0 > 0:
        raise ConfigError(f"sigma0 must be positive, got {sigma0}")

    height = raw["barrier_height"]
    V0 = 2.0 * packet_energy(p0=p0, sigma0=sigma0) if height == "2E" else float(height)

    n_ramp = int(raw["ramp_steps"])
    if n_ramp < 0:
        raise ConfigError(f"ramp_steps must be >= 0, got {n_ramp}")
    epsilon = raw["epsilon"]
    if epsilon == "auto":
        epsilon = n_ramp * grid.dt
    else:
        epsilon = float(epsilon)
        if n_ramp and not math.isclose(epsilon, n_ramp * grid.dt, rel_tol=1e-9):
            raise ConfigError(
                f"epsilon = {epsilon} must equal ramp_steps * dt = {n_ramp * grid.dt}"
            )
    barrier = BarrierSchedule(
        x_c=float(raw["barrier_center"]),
        width=float(raw["barrier_width"]),
        V0=V0,
        mode="ramp_down" if n_ramp else "static",
        t_p=float(raw["t_p"]),
        epsilon=epsilon,
        ramp_steps=n_ramp,
    )

    x_prime = raw["x_prime"]
    x_prime = auto_x_prime(x0, sigma0) if x_prime == "auto" else float(x_prime)
    D = raw["detector_D"]
    D = detector_distance(D, barrier, x_prime) if D in ("edge", "center") else float(D)

    return SimulationConfig(
        grid=grid,
        x0=x0,
        sigma0=sigma0,
        p0=p0,
        barrier=barrier,
        x_prime=x_prime,
        detector_D=D,
        units=UnitsNote(mass=float(raw["mass"])),
    )


def default_config() -> SimulationConfig:
    """The canonical run: static barrier of height 2E, dt = 2e-6, t_p = 8e-4."""
    return build_config()


def validate(config: SimulationConfig) -> list[str]:
    """Return every violated invariant; an empty list means the config is usable."""
    problems = []
    g, b = config.grid, config.barrier

    if config.units.hbar != HBAR:
        problems.append(f"hbar must be 1, got {config.units.hbar}")
    if not config.units.mass > 0:
        problems.append(f"mass must be positive, got {config.units.mass}")

    if not g.x_max > g.x_min:
        problems.append("grid x_max must exceed x_min")
    if g.n_points < 3:
        problems.append(f"grid needs at least 3 points, got {g.n_points}")
    if not g.dt > 0:
        problems.append(f"dt must be positive, got {g.dt}")
    if g.n_steps < 1:
        problems.append(f"n_steps must be >= 1, got {g.n_steps}")
    if not config.sigma0 > 0:
        problems.append(f"sigma0 must be positive, got {config.sigma0}")
    if not config.p0 > 0:
        problems.append(f"p0 must be positive, got {config.p0}")

    chain = [
        ("x_min", g.x_min),
        ("x_prime", config.x_prime),
        ("x0", config.x0),
        ("barrier left edge", b.left_edge),
        ("barrier right edge", b.right_edge),
        ("x_max", g.x_max),
    ]
    for (name_a, a), (name_b, b_) in zip(chain, chain[1:]):
        if not a < b_:
            problems.append(f"ordering {name_a} < {name_b} violated ({a} >= {b_})")

    problems.extend(b.violations(g.dt))

    if g.x_max > g.x_min and g.n_points >= 2:
        phase = config.p0 * g.dx
        if phase >= MAX_PHASE_PER_CELL:
            problems.append(f"p0·dx = {phase:.3g} ≥ {MAX_PHASE_PER_CELL}")
    if config.sigma0 > 0:
        for name, wall in (("x_min", g.x_min), ("x_max", g.x_max)):
            rel = math.exp(-((wall - config.x0) ** 2) / (2.0 * config.sigma0**2))
            if rel >= MAX_WALL_DENSITY:
                problems.append(
                    f"initial packet not negligible at wall {name}: "
                    f"density ratio {rel:.3g} ≥ {MAX_WALL_DENSITY}"
                )
    return problems


def parse_config(text: str) -> dict:
    """Parse ``key=value`` lines into a raw parameter dict.

    Blank lines and ``#`` comments are skipped. Unknown or repeated keys and
    malformed values raise ConfigError carrying the 1-based line number.
    """
    params: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {line!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        if key in params:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        if value in _LITERALS.get(key, ()):
            params[key] = value
            continue
        try:
            params[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise ConfigError(f"bad value for {key}: {value!r}", line=lineno) from None
    return params


def load_config(path) -> SimulationConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config not found: {path}")
    return build_config(parse_config(path.read_text(encoding="utf-8")))


def format_config(config: SimulationConfig) -> str:
    """Serialize to the key=value format; numeric values are written in full."""
    g, b = config.grid, config.barrier
    values = {
        "x0": config.x0,
        "sigma0": config.sigma0,
        "p0": config.p0,
        "barrier_center": b.x_c,
        "barrier_width": b.width,
        "barrier_height": b.V0,
        "x_prime": config.x_prime,
        "t_p": b.t_p,
        "epsilon": b.epsilon,
        "ramp_steps": b.ramp_steps if b.mode == "ramp_down" else 0,
        "dt": g.dt,
        "n_steps": g.n_steps,
        "x_min": g.x_min,
        "x_max": g.x_max,
        "n_points": g.n_points,
        "detector_D": config.detector_D,
        "mass": config.units.mass,
    }
    return "".join(f"{k} = {v!r}\n" for k, v in values.items())
