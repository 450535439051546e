"""Superarrival measures extracted from a static/perturbed trace pair."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    AcausalInputError,
    DegenerateWindowError,
    NoCrossingError,
    NoDeviationError,
)
from .io import fmt

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 1e-3


def _check_axes(trace_s, trace_p):
    if len(trace_s.times) != len(trace_p.times) or not np.array_equal(
        trace_s.times, trace_p.times
    ):
        raise ValueError("static and perturbed traces must share the same time axis")


def detect_deviation(trace_s, trace_p, threshold: float = DEFAULT_THRESHOLD) -> float:
    """First time |r2_p - r2_s| exceeds ``threshold``, linearly interpolated."""
    _check_axes(trace_s, trace_p)
    t = trace_s.times
    gap = np.abs(np.asarray(trace_p.r2) - np.asarray(trace_s.r2))
    above = np.flatnonzero(gap > threshold)
    if above.size == 0:
        raise NoDeviationError(
            f"perturbed trace never departs from the static one by more than {threshold:g}"
        )
    i = int(above[0])
    if i == 0:
        return float(t[0])
    g0, g1 = gap[i - 1], gap[i]
    return float(t[i - 1] + (threshold - g0) / (g1 - g0) * (t[i] - t[i - 1]))


def _interp(times, values, t):
    return float(np.interp(t, times, values))


def detect_crossing(trace_s, trace_p, t_d: float) -> float:
    """First time after ``t_d`` at which r2_p - r2_s changes sign."""
    _check_axes(trace_s, trace_p)
    t = trace_s.times
    diff = np.asarray(trace_p.r2) - np.asarray(trace_s.r2)
    start = int(np.searchsorted(t, t_d, side="right"))
    if start >= len(t):
        raise NoCrossingError(f"t_d = {t_d} is at or beyond the end of the trace")
    ref = np.sign(diff[start])
    if ref == 0:
        return float(t[start])
    flipped = np.flatnonzero(np.sign(diff[start + 1 :]) != ref)
    if flipped.size == 0:
        raise NoCrossingError("perturbed and static traces do not cross after t_d")
    k = start + 1 + int(flipped[0])
    d0, d1 = diff[k - 1], diff[k]
    if d1 == 0:
        return float(t[k])
    return float(t[k - 1] + d0 / (d0 - d1) * (t[k] - t[k - 1]))


def _window_integral(times, values, a, b):
    inner = (times > a) & (times < b)
    ts = np.concatenate(([a], times[inner], [b]))
    vs = np.concatenate(([_interp(times, values, a)], values[inner], [_interp(times, values, b)]))
    return float(np.trapezoid(vs, ts))


class Eta(NamedTuple):
    I_p: float
    I_s: float
    eta: float


def superarrival_eta(trace_s, trace_p, t_d: float, t_c: float) -> Eta:
    """Integrated reflection of both traces over [t_d, t_c] and their relative excess."""
    _check_axes(trace_s, trace_p)
    t = np.asarray(trace_s.times)
    if not t[0] <= t_d < t_c <= t[-1]:
        raise DegenerateWindowError(f"window [{t_d}, {t_c}] is empty or outside the trace")
    I_p = _window_integral(t, np.asarray(trace_p.r2), t_d, t_c)
    I_s = _window_integral(t, np.asarray(trace_s.r2), t_d, t_c)
    if I_s == 0:
        raise DegenerateWindowError("static trace integrates to zero over the window")
    return Eta(I_p, I_s, (I_p - I_s) / I_s)


def locality_tau(t_p: float, epsilon: float, D: float, v_g: float) -> float:
    """Latest detection time still attributable to particles reflected before
    the switch-off started, in a group-velocity picture."""
    if not v_g > 0:
        raise ValueError(f"group velocity must be positive, got {v_g}")
    return (t_p - epsilon / 2.0) + D / v_g


class EffectVelocity(NamedTuple):
    v_e: float
    ratio: float | None


def effect_velocity(D, t_d, t_p, epsilon, v_g=None) -> EffectVelocity:
    """Speed at which the switch-off is felt a distance ``D`` away."""
    lag = t_d - (t_p - epsilon / 2.0)
    if not lag > 0:
        raise AcausalInputError(
            f"deviation at t_d = {t_d} does not follow the switch-off start {t_p - epsilon / 2.0}"
        )
    v_e = D / lag
    return EffectVelocity(v_e, None if v_g is None else v_e / v_g)


@dataclass(frozen=True)
class SuperarrivalReport:
    N: int
    epsilon: float
    t_p: float
    t_d: float
    t_c: float
    delta_t: float
    I_p: float
    I_s: float
    eta: float
    tau: float
    D: float
    v_e: float
    v_g: float
    ratio: float
    locality_violated: bool
    threshold: float
    # Deviation found no later than the perturbation centre; possible for long
    # ramps, suspicious for short ones.
    early_deviation: bool

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _same_setup(cfg_s, cfg_p) -> bool:
    def strip(cfg):
        b = cfg.barrier
        return cfg.replace(barrier=(b.x_c, b.width, b.V0))

    return strip(cfg_s) == strip(cfg_p)


def build_report(run_s, run_p, D=None, threshold: float = DEFAULT_THRESHOLD) -> SuperarrivalReport:
    """Assemble every measure for one (static, perturbed) pair of simulation results."""
    cfg_s, cfg_p = run_s.config, run_p.config
    if cfg_s is None or cfg_p is None:
        raise ValueError("simulation results must carry their configs")
    if cfg_p.barrier.mode != "ramp_down":
        raise ValueError("second run must have a ramp_down barrier")
    if not _same_setup(cfg_s, cfg_p):
        raise ValueError("runs differ in more than the barrier schedule")

    b = cfg_p.barrier
    D = cfg_p.detector_D if D is None else D
    v_g = cfg_p.group_velocity
    ts, tp = run_s.trace, run_p.trace

    t_d = detect_deviation(ts, tp, threshold)
    t_c = detect_crossing(ts, tp, t_d)
    eta = superarrival_eta(ts, tp, t_d, t_c)
    tau = locality_tau(b.t_p, b.epsilon, D, v_g)
    v_e, ratio = effect_velocity(D, t_d, b.t_p, b.epsilon, v_g)
    early = t_d <= b.t_p
    if early:
        log.warning("N=%d: deviation at %.6g precedes t_p = %.6g", b.ramp_steps, t_d, b.t_p)

    return SuperarrivalReport(
        N=b.ramp_steps,
        epsilon=b.epsilon,
        t_p=b.t_p,
        t_d=t_d,
        t_c=t_c,
        delta_t=t_c - t_d,
        I_p=eta.I_p,
        I_s=eta.I_s,
        eta=eta.eta,
        tau=tau,
        D=D,
        v_e=v_e,
        v_g=v_g,
        ratio=ratio,
        locality_violated=t_d < tau,
        threshold=threshold,
        early_deviation=early,
    )


def format_kv(report: SuperarrivalReport) -> str:
    lines = []
    for key, value in report.as_dict().items():
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, int):
            text = str(value)
        else:
            text = fmt(value)
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def parse_kv(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, value = line.split("=", 1)
        if value in ("true", "false"):
            out[key] = value == "true"
        else:
            try:
                out[key] = int(value)
            except ValueError:
                out[key] = float(value)
    return out


def _table(header, rows) -> str:
    cells = [list(header)] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _ms(t):
    return f"{t * 1e3:.4f}"


def table1(reports) -> str:
    """N, epsilon, t_d, t_c, delta_t (all x1e-3) and eta."""
    return _table(
        ("N", "eps(1e-3)", "t_d(1e-3)", "t_c(1e-3)", "dt(1e-3)", "eta"),
        [
            (r.N, f"{r.epsilon * 1e3:.3f}", _ms(r.t_d), _ms(r.t_c), _ms(r.delta_t), f"{r.eta:.4f}")
            for r in reports
        ],
    )


def table2(reports) -> str:
    """N, epsilon, t_d, tau and the locality verdict."""
    return _table(
        ("N", "eps(1e-3)", "t_d(1e-3)", "tau(1e-3)", "locality"),
        [
            (
                r.N,
                f"{r.epsilon * 1e3:.3f}",
                _ms(r.t_d),
                _ms(r.tau),
                "violated" if r.locality_violated else "satisfied",
            )
            for r in reports
        ],
    )


def table3(reports) -> str:
    """N, epsilon, t_d, tau, v_e and v_g (in units of pi) and their ratio."""
    return _table(
        ("N", "eps(1e-3)", "t_d(1e-3)", "tau(1e-3)", "v_e", "v_g", "v_e/v_g"),
        [
            (
                r.N,
                f"{r.epsilon * 1e3:.3f}",
                _ms(r.t_d),
                _ms(r.tau),
                f"{r.v_e / math.pi:.2f}pi",
                f"{r.v_g / math.pi:.2f}pi",
                f"{r.ratio:.3f}",
            )
            for r in reports
        ],
    )


def format_report(reports) -> str:
    reports = list(reports)
    return "\n".join(
        [
            "Table 1: superarrival interval and magnitude",
            table1(reports),
            "Table 2: locality condition t_d > tau",
            table2(reports),
            "Table 3: effect propagation speed",
            table3(reports),
        ]
    )
