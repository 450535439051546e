"""Initial Gaussian packet and the analytic oracles built around it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Grid, MAX_WALL_DENSITY
from .errors import ConfigError
from .io import write_csv

# Spectral window half-width, in units of the momentum spread 1/(2 sigma0).
SPECTRUM_HALF_WIDTH = 8.0
SPECTRUM_POINTS = 1601


@dataclass
class WaveFunction:
    grid: Grid
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} samples, got shape {self.values.shape}"
            )

    @property
    def x(self) -> np.ndarray:
        return self.grid.coordinates()

    def density(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2

    def norm(self) -> float:
        """Discrete norm sum |psi_i|^2 dx (equal to the trapezoid rule when the
        endpoints vanish)."""
        return float(np.sum(self.density()) * self.grid.dx)

    def copy(self) -> WaveFunction:
        return WaveFunction(self.grid, self.values.copy(), self.t)


@dataclass(frozen=True)
class MomentumSpectrum:
    p_values: np.ndarray
    amplitudes: np.ndarray
    dp: float = field(default=0.0)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def total(self) -> float:
        return float(np.trapezoid(self.density(), dx=self.dp))

    def centroid(self) -> float:
        w = self.density()
        return float(np.trapezoid(w * self.p_values, dx=self.dp) / self.total())

    def std(self) -> float:
        w = self.density()
        mean = self.centroid()
        var = np.trapezoid(w * (self.p_values - mean) ** 2, dx=self.dp) / self.total()
        return float(np.sqrt(var))

    def peak(self) -> float:
        return float(self.p_values[np.argmax(self.density())])


def gaussian_packet(grid: Grid, x0: float, sigma0: float, p0: float) -> WaveFunction:
    """Sample the Gaussian packet on ``grid`` and renormalize to unit discrete norm.

    ``sigma0`` is the standard deviation of the density |psi|^2. The endpoints
    are set to zero to honour the hard walls.
    """
    if not sigma0 > 0:
        raise ConfigError(f"sigma0 must be positive, got {sigma0}")
    for wall in (grid.x_min, grid.x_max):
        if math.exp(-((wall - x0) ** 2) / (2.0 * sigma0**2)) >= MAX_WALL_DENSITY:
            raise ConfigError(
                f"packet centred at {x0} with width {sigma0} overlaps the wall at {wall}"
            )
    x = grid.coordinates()
    amp = (2.0 * math.pi * sigma0**2) ** -0.25
    psi = amp * np.exp(-((x - x0) ** 2) / (4.0 * sigma0**2) + 1j * p0 * x)
    psi[0] = psi[-1] = 0.0
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return WaveFunction(grid, psi, 0.0)


def momentum_spectrum(
    wf: WaveFunction,
    p0: float,
    sigma0: float,
    n_points: int = SPECTRUM_POINTS,
    half_width: float = SPECTRUM_HALF_WIDTH,
) -> MomentumSpectrum:
    """Fourier amplitudes phi(p) = (2 pi)^-1/2 sum_j psi_j exp(-i p x_j) dx.

    The momentum window is centred on ``p0`` and spans ``half_width`` spectral
    standard deviations 1/(2 sigma0) either side.
    """
    spread = half_width / (2.0 * sigma0)
    p = np.linspace(p0 - spread, p0 + spread, n_points)
    dp = p[1] - p[0]

    x = wf.x
    psi = wf.values
    dens = wf.density()
    keep = dens > dens.max() * 1e-32
    x, psi = x[keep], psi[keep]

    phi = np.empty(n_points, dtype=np.complex128)
    chunk = 256
    for start in range(0, n_points, chunk):
        block = p[start : start + chunk, None]
        phi[start : start + chunk] = np.exp(-1j * block * x[None, :]) @ psi
    phi *= wf.grid.dx / math.sqrt(2.0 * math.pi)
    return MomentumSpectrum(p, phi, float(dp))


def free_evolution_density(x, t, x0, sigma0, p0, mass=0.5, hbar=1.0):
    """Analytic density of the freely evolving Gaussian packet.

    Centre moves at p0/m; the density width grows as
    sigma0 * sqrt(1 + (hbar t / (2 m sigma0^2))^2).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    sigma_t = free_width(t, sigma0, mass, hbar)
    x = np.asarray(x, dtype=float)
    centre = x0 + p0 / mass * t
    return np.exp(-((x - centre) ** 2) / (2.0 * sigma_t**2)) / math.sqrt(
        2.0 * math.pi * sigma_t**2
    )


def free_width(t, sigma0, mass=0.5, hbar=1.0):
    return sigma0 * math.sqrt(1.0 + (hbar * t / (2.0 * mass * sigma0**2)) ** 2)


def write_snapshot(path, wf: WaveFunction) -> None:
    """CSV with columns x,re,im,density; one row per grid point."""
    write_csv(
        path,
        ("x", "re", "im", "density"),
        (wf.x, wf.values.real, wf.values.imag, wf.density()),
    )
