"""Reflection-probability functionals on wave functions and traces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotAsymptoticError
from .io import write_csv

ASYMPTOTE_FRACTION = 0.05
FLATNESS_LIMIT = 0.01


@dataclass(frozen=True)
class ReflectionTrace:
    """Time series of the reflection probability and the total norm."""

    times: np.ndarray
    r2: np.ndarray
    norm: np.ndarray
    config_tag: str = ""

    def __len__(self):
        return len(self.times)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def write_csv(self, path) -> None:
        write_csv(path, ("t", "R2", "norm"), (self.times, self.r2, self.norm))


def partial_integral(density: np.ndarray, dx: float, x_min: float, x_upper: float) -> float:
    """Trapezoid integral of grid samples from ``x_min`` up to ``x_upper``.

    The last partial cell uses a linearly interpolated density, so the result
    is continuous and nondecreasing in ``x_upper``.
    """
    s = (x_upper - x_min) / dx
    i = int(np.floor(s + 1e-9))
    i = min(i, len(density) - 1)
    full = 0.0
    if i > 0:
        full = dx * (np.sum(density[1:i]) + 0.5 * (density[0] + density[i]))
    frac = s - i
    if frac > 1e-9 and i + 1 < len(density):
        d_end = density[i] + frac * (density[i + 1] - density[i])
        full += 0.5 * frac * dx * (density[i] + d_end)
    return float(full)


def reflection_probability(wf, x_prime: float) -> float:
    """Probability to find the particle left of ``x_prime``.

    The left wall of the box stands in for minus infinity.
    """
    g = wf.grid
    if not g.x_min <= x_prime <= g.x_max:
        raise ValueError(f"x_prime = {x_prime} lies outside [{g.x_min}, {g.x_max}]")
    return partial_integral(wf.density(), g.dx, g.x_min, x_prime)


class Asymptote(NamedTuple):
    value: float
    flatness: float


def asymptotic_reflection(
    trace: ReflectionTrace,
    fraction: float = ASYMPTOTE_FRACTION,
    flatness_limit: float = FLATNESS_LIMIT,
) -> Asymptote:
    """Mean of the trace over its final ``fraction`` of samples.

    Raises NotAsymptoticError if the trace still moves by more than
    ``flatness_limit`` (max - min) inside that window.
    """
    n = max(1, int(round(len(trace.r2) * fraction)))
    tail = np.asarray(trace.r2[-n:])
    flatness = float(tail.max() - tail.min())
    if flatness > flatness_limit:
        raise NotAsymptoticError(
            f"reflection still varying by {flatness:.3g} over the final "
            f"{n} samples (limit {flatness_limit})"
        )
    return Asymptote(float(tail.mean()), flatness)
