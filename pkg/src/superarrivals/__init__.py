"""Wave-packet scattering off a barrier that is switched off mid-flight."""

from .analysis import SuperarrivalReport, build_report
from .core import Grid, SimulationConfig, UnitsNote, default_config, load_config, packet_energy, validate
from .errors import SuperarrivalsError
from .observables import ReflectionTrace, asymptotic_reflection, reflection_probability
from .potential import BarrierSchedule, potential_on_grid, ramp_factor
from .propagator import SimulationResult, run, step
from .wavepacket import WaveFunction, gaussian_packet, momentum_spectrum

__all__ = [
    "BarrierSchedule",
    "Grid",
    "ReflectionTrace",
    "SimulationConfig",
    "SimulationResult",
    "SuperarrivalReport",
    "SuperarrivalsError",
    "UnitsNote",
    "WaveFunction",
    "asymptotic_reflection",
    "build_report",
    "default_config",
    "gaussian_packet",
    "load_config",
    "momentum_spectrum",
    "packet_energy",
    "potential_on_grid",
    "ramp_factor",
    "reflection_probability",
    "run",
    "step",
    "validate",
]
