"""Stationary plane-wave scattering off a rectangular barrier.

This is an oracle independent of the time stepper: the packet's long-time
reflection probability must agree with the momentum average of the
plane-wave coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .io import write_csv

# Below this |z|, sin(z)/z and sinh(z)/z use their Taylor series.
_SERIES_CUTOFF = 1e-3


@dataclass(frozen=True)
class BarrierSpec:
    V0: float
    width: float
    mass: float = 0.5

    def __post_init__(self):
        if not self.V0 >= 0:
            raise ValueError(f"barrier height must be >= 0, got {self.V0}")
        if not self.width > 0:
            raise ValueError(f"barrier width must be positive, got {self.width}")

    @property
    def k2_barrier(self) -> float:
        """2 m V0 / hbar^2: the barrier height in squared-wavenumber units."""
        return 2.0 * self.mass * self.V0


def _sinc_length(z2, w):
    """sin(z)/z * w for z^2 >= 0 and sinh(|z|)/|z| * w for z^2 < 0, with z = q w."""
    z2 = np.asarray(z2, dtype=float)
    z = np.sqrt(np.abs(z2))
    out = np.empty_like(z)
    small = z < _SERIES_CUTOFF
    zs = z2[small]
    out[small] = 1.0 - zs / 6.0 + zs**2 / 120.0
    big = ~small
    above = big & (z2 > 0)
    below = big & (z2 < 0)
    out[above] = np.sin(z[above]) / z[above]
    with np.errstate(over="ignore"):
        out[below] = np.sinh(z[below]) / z[below]
    return out * w


def plane_wave_reflection(p, spec: BarrierSpec):
    """|R(p)|^2 for a plane wave exp(i p x) hitting the barrier.

    Written as 1 / (1 + 4 p^2 / (K^2 s^2)) with K = 2 m V0 and
    s = sin(q w)/q (sinh(kappa w)/kappa below the top), which is finite and
    continuous through p^2 = K.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("plane-wave momentum must be positive")
    K = spec.k2_barrier
    if K == 0:
        return np.zeros_like(p)[()]
    s = _sinc_length((p**2 - K) * spec.width**2, spec.width)
    with np.errstate(divide="ignore", over="ignore"):
        ratio = 4.0 * p**2 / (K**2 * s**2)
    return (1.0 / (1.0 + ratio))[()]


def momentum_integrated_reflection(spectrum, spec: BarrierSpec) -> float:
    """Trapezoid average of |R(p)|^2 over |phi(p)|^2 on the spectrum's own grid.

    Components with p <= 0 already move away from the barrier and count as
    reflected.
    """
    p = spectrum.p_values
    weight = spectrum.density()
    refl = np.ones_like(p)
    pos = p > 0
    refl[pos] = plane_wave_reflection(p[pos], spec)
    return float(np.clip(np.trapezoid(weight * refl, dx=spectrum.dp), 0.0, 1.0))


def write_reflection_curve(path, p_values, spec: BarrierSpec) -> None:
    p_values = np.asarray(p_values, dtype=float)
    write_csv(path, ("p", "R2"), (p_values, plane_wave_reflection(p_values, spec)))
