"""Rectangular barrier and its time-dependent switch-off schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ScheduleError

MODES = ("static", "ramp_down")

# Times closer than this (in units of one ramp sub-step) to a sub-interval
# boundary are snapped onto it, so t = k*dt lands in the intended interval.
_SNAP = 1e-9


@dataclass(frozen=True)
class BarrierSchedule:
    """Barrier geometry plus the switch-off protocol.

    In ``ramp_down`` mode the height drops from ``V0`` to 0 over
    ``[t_p - epsilon/2, t_p + epsilon/2]`` in ``ramp_steps`` equal decrements.
    """

    x_c: float
    width: float
    V0: float
    mode: str = "static"
    t_p: float = 8e-4
    epsilon: float = 0.0
    ramp_steps: int = 0

    @property
    def left_edge(self) -> float:
        return self.x_c - self.width / 2.0

    @property
    def right_edge(self) -> float:
        return self.x_c + self.width / 2.0

    @property
    def switch_off_start(self) -> float:
        return self.t_p - self.epsilon / 2.0

    def factor(self, t: float) -> float:
        if self.mode == "static":
            return 1.0
        return ramp_factor(t, self.t_p, self.epsilon, self.ramp_steps)

    def violations(self, dt: float | None = None) -> list[str]:
        problems = []
        if self.mode not in MODES:
            problems.append(f"barrier mode must be one of {MODES}, got {self.mode!r}")
        if not self.width > 0:
            problems.append(f"barrier width must be positive, got {self.width}")
        if not self.V0 >= 0:
            problems.append(f"barrier height must be >= 0, got {self.V0}")
        if self.mode == "ramp_down":
            if self.ramp_steps < 1:
                problems.append(f"ramp_steps must be >= 1, got {self.ramp_steps}")
            if not self.epsilon > 0:
                problems.append(f"epsilon must be positive, got {self.epsilon}")
            elif dt is not None and not math.isclose(
                self.epsilon, self.ramp_steps * dt, rel_tol=1e-9
            ):
                problems.append(
                    f"epsilon = {self.epsilon:.6g} must equal ramp_steps·dt = "
                    f"{self.ramp_steps * dt:.6g}"
                )
        return problems


def ramp_factor(t: float, t_p: float, epsilon: float, N: int) -> float:
    """Staircase version of a linear ramp from 1 down to 0.

    The window ``[t_p - epsilon/2, t_p + epsilon/2)`` is cut into ``N``
    sub-intervals; inside the k-th one (k = 1..N) the factor is ``1 - k/N``.
    The factor is 1 before the window and 0 from its end onwards.
    """
    if N < 1:
        raise ScheduleError(f"ramp needs N >= 1 sub-steps, got {N}")
    if not epsilon > 0:
        raise ScheduleError(f"switch-off span must be positive, got {epsilon}")
    h = epsilon / N
    u = (t - (t_p - epsilon / 2.0)) / h
    nearest = round(u)
    if abs(u - nearest) < _SNAP:
        u = nearest
    if u < 0:
        return 1.0
    k = math.floor(u) + 1
    if k >= N:
        return 0.0
    return 1.0 - k / N


def barrier_mask(grid, schedule: BarrierSchedule) -> np.ndarray:
    """Boolean mask of grid points under the barrier.

    Both edges snap to their nearest grid point and are included.
    """
    lo = max(grid.index_of(schedule.left_edge), 0)
    hi = min(grid.index_of(schedule.right_edge), grid.n_points - 1)
    mask = np.zeros(grid.n_points, dtype=bool)
    if hi >= lo:
        mask[lo : hi + 1] = True
    return mask


def potential_on_grid(grid, schedule: BarrierSchedule, t: float) -> np.ndarray:
    return schedule.V0 * schedule.factor(t) * barrier_mask(grid, schedule)
