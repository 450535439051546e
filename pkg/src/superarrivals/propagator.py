"""Implicit, norm-preserving time stepping of the 1D Schrodinger equation.

Each step solves the Cayley form

    (1 + i H dt/2) psi(t + dt) = (1 - i H dt/2) psi(t)

with H = -(hbar^2/2m) d^2/dx^2 + V(x, t) discretized by the three-point
Laplacian on the interior points; the two boundary samples are held at zero
(hard walls). The resulting tridiagonal system is solved by Thomas
elimination.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numba
import numpy as np

from .core import SimulationConfig, validate
from .errors import ConfigError, NumericalBreakdown
from .observables import ReflectionTrace, partial_integral
from .potential import BarrierSchedule, barrier_mask, potential_on_grid
from .wavepacket import WaveFunction, gaussian_packet

log = logging.getLogger(__name__)

WALL_POINTS = 10


@dataclass(frozen=True)
class TridiagonalSystem:
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.lower) != n - 1 or len(self.upper) != n - 1:
            raise ValueError(
                f"inconsistent sizes: lower {len(self.lower)}, diag {n}, upper {len(self.upper)}"
            )

    @property
    def n(self) -> int:
        return len(self.diag)

    def is_diagonally_dominant(self, strict: bool = True) -> bool:
        off = np.zeros(self.n)
        off[1:] += np.abs(self.lower)
        off[:-1] += np.abs(self.upper)
        d = np.abs(self.diag)
        return bool(np.all(d > off) if strict else np.all(d >= off))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[1:] += self.lower * v[:-1]
        out[:-1] += self.upper * v[1:]
        return out

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)


@numba.njit(cache=True, nogil=True)
def _thomas_factor(lower, diag, upper, c, inv_piv):
    """Forward elimination of the matrix alone. Fills the modified upper
    diagonal ``c`` and reciprocal pivots; returns the row of a zero pivot or -1."""
    n = diag.shape[0]
    piv = diag[0]
    for i in range(n):
        if i > 0:
            piv = diag[i] - lower[i - 1] * c[i - 1]
        if piv == 0:
            return i
        inv_piv[i] = 1.0 / piv
        c[i] = upper[i] * inv_piv[i] if i < n - 1 else 0.0
    return -1


@numba.njit(cache=True, nogil=True)
def _thomas_solve(lower, c, inv_piv, rhs, out):
    n = rhs.shape[0]
    out[0] = rhs[0] * inv_piv[0]
    for i in range(1, n):
        out[i] = (rhs[i] - lower[i - 1] * out[i - 1]) * inv_piv[i]
    for i in range(n - 2, -1, -1):
        out[i] -= c[i] * out[i + 1]


class TridiagonalFactor:
    """Thomas elimination split into a matrix-only factorization and cheap
    per-right-hand-side substitutions."""

    def __init__(self, system: TridiagonalSystem):
        n = system.n
        self.lower = np.ascontiguousarray(system.lower, dtype=np.complex128)
        self.c = np.empty(n, dtype=np.complex128)
        self.inv_piv = np.empty(n, dtype=np.complex128)
        bad = _thomas_factor(
            self.lower,
            np.ascontiguousarray(system.diag, dtype=np.complex128),
            np.ascontiguousarray(system.upper, dtype=np.complex128),
            self.c,
            self.inv_piv,
        )
        if bad >= 0:
            raise NumericalBreakdown(f"zero pivot in row {bad}")

    def solve(self, rhs: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        if out is None:
            out = np.empty(len(self.c), dtype=np.complex128)
        _thomas_solve(self.lower, self.c, self.inv_piv, rhs, out)
        return out


def solve_tridiagonal(system: TridiagonalSystem, rhs) -> np.ndarray:
    """Solve ``system @ x = rhs``; raises NumericalBreakdown on a zero pivot."""
    rhs = np.asarray(rhs, dtype=np.complex128)
    if rhs.shape != (system.n,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({system.n},)")
    return TridiagonalFactor(system).solve(rhs)


@numba.njit(cache=True, nogil=True)
def _explicit_half(psi, V, dt, kin):
    """Interior samples of (1 - i H dt/2) psi with psi = 0 at both walls."""
    n = psi.shape[0]
    out = np.empty(n - 2, dtype=np.complex128)
    for j in range(1, n - 1):
        lap = psi[j - 1] - 2.0 * psi[j] + psi[j + 1]
        h_psi = -kin * lap + V[j] * psi[j]
        out[j - 1] = psi[j] - 0.5j * dt * h_psi
    return out


def cayley_system(V: np.ndarray, dt: float, dx: float, kinetic: float = 1.0) -> TridiagonalSystem:
    """Implicit half (1 + i H dt/2) restricted to the interior points."""
    kin = kinetic / dx**2
    m = len(V) - 2
    off = np.full(m - 1, -0.5j * dt * kin, dtype=np.complex128)
    diag = 1.0 + 0.5j * dt * (2.0 * kin + np.asarray(V[1:-1], dtype=float))
    return TridiagonalSystem(off, diag.astype(np.complex128), off.copy())


class _Stepper:
    """Advances raw amplitude arrays, reusing the implicit system while the
    potential is unchanged."""

    def __init__(self, grid, schedule: BarrierSchedule, kinetic: float):
        self.grid = grid
        self.schedule = schedule
        self.kinetic = kinetic
        self.mask = barrier_mask(grid, schedule)
        self._cached_factor = None
        self._lu = None
        self._V = None

    def _prepare(self, factor: float):
        if factor != self._cached_factor:
            self._V = self.schedule.V0 * factor * self.mask
            system = cayley_system(self._V, self.grid.dt, self.grid.dx, self.kinetic)
            self._lu = TridiagonalFactor(system)
            self._cached_factor = factor

    def advance(self, psi: np.ndarray, t: float) -> np.ndarray:
        self._prepare(self.schedule.factor(t))
        kin = self.kinetic / self.grid.dx**2
        rhs = _explicit_half(psi, self._V, self.grid.dt, kin)
        new = np.zeros_like(psi)
        self._lu.solve(rhs, new[1:-1])
        return new


def step(
    state: WaveFunction,
    schedule: BarrierSchedule,
    dt: float | None = None,
    mass: float = 0.5,
) -> WaveFunction:
    """One Cayley step from ``state.t``; the potential is taken at the step's start."""
    grid = state.grid
    dt = grid.dt if dt is None else dt
    V = potential_on_grid(grid, schedule, state.t)
    kin = 1.0 / (2.0 * mass) / grid.dx**2
    system = cayley_system(V, dt, grid.dx, 1.0 / (2.0 * mass))
    rhs = _explicit_half(state.values, V, dt, kin)
    new = np.zeros_like(state.values)
    new[1:-1] = solve_tridiagonal(system, rhs)
    return WaveFunction(grid, new, state.t + dt)


@dataclass
class SimulationResult:
    trace: ReflectionTrace
    snapshots: list[tuple[float, WaveFunction]]
    final_state: WaveFunction
    config: SimulationConfig | None = None
    # Largest probability seen in the outermost WALL_POINTS samples on either side.
    wall_probability: float = 0.0
    tag: str = field(default="")


def schedule_tag(schedule: BarrierSchedule) -> str:
    return "static" if schedule.mode == "static" else f"N{schedule.ramp_steps}"


def run(
    config: SimulationConfig,
    snapshot_times=None,
    initial: WaveFunction | None = None,
    check: bool = True,
) -> SimulationResult:
    """Evolve the initial packet for ``n_steps`` steps, recording the trace.

    ``snapshot_times`` default to 0, t_p (when inside the run) and the final
    time; each is rounded to the nearest step.
    """
    if check:
        problems = validate(config)
        if problems:
            raise ConfigError("; ".join(problems))
    grid = config.grid
    schedule = config.barrier
    if snapshot_times is None:
        snapshot_times = [t for t in (0.0, schedule.t_p, grid.total_time) if t <= grid.total_time]
    wanted: dict[int, list[float]] = {}
    for t in snapshot_times:
        k = int(round(t / grid.dt))
        if not 0 <= k <= grid.n_steps:
            raise ValueError(f"snapshot time {t} outside the run [0, {grid.total_time}]")
        wanted.setdefault(k, []).append(t)

    if initial is None:
        initial = gaussian_packet(grid, config.x0, config.sigma0, config.p0)
    psi = initial.values.copy()
    stepper = _Stepper(grid, schedule, config.units.kinetic_factor)

    n = grid.n_steps
    dx = grid.dx
    times = grid.times()
    r2 = np.empty(n + 1)
    norm = np.empty(n + 1)
    snapshots = []
    wall = 0.0

    def record(k, psi):
        nonlocal wall
        dens = psi.real**2 + psi.imag**2
        r2[k] = partial_integral(dens, dx, grid.x_min, config.x_prime)
        norm[k] = np.sum(dens) * dx
        wall = max(
            wall, np.sum(dens[:WALL_POINTS]) * dx, np.sum(dens[-WALL_POINTS:]) * dx
        )
        if not np.isfinite(norm[k]):
            raise NumericalBreakdown("non-finite amplitudes", step=k)
        if k in wanted:
            snapshots.append((float(times[k]), WaveFunction(grid, psi.copy(), float(times[k]))))

    record(0, psi)
    for k in range(n):
        try:
            psi = stepper.advance(psi, k * grid.dt)
        except NumericalBreakdown as exc:
            raise NumericalBreakdown(str(exc), step=k) from exc
        record(k + 1, psi)

    tag = schedule_tag(schedule)
    log.debug("run %s: %d steps, final norm %.15f", tag, n, norm[-1])
    return SimulationResult(
        trace=ReflectionTrace(times, r2, norm, tag),
        snapshots=snapshots,
        final_state=WaveFunction(grid, psi, float(times[-1])),
        config=config,
        wall_probability=float(wall),
        tag=tag,
    )
