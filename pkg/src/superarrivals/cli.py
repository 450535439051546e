"""Command line entry point: single runs, static/perturbed pairs and N sweeps."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis
from .core import SimulationConfig, default_config, detector_distance, load_config
from .errors import ConfigError, DetectionError, NotAsymptoticError, NumericalBreakdown, SuperarrivalsError
from .io import fmt
from .observables import asymptotic_reflection
from .planewave import BarrierSpec, momentum_integrated_reflection, write_reflection_curve
from .propagator import SimulationResult, run
from .wavepacket import gaussian_packet, momentum_spectrum, write_snapshot

log = logging.getLogger("superarrivals")

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
DEFAULT_N_LIST = (2, 10, 30, 50)
MODES = ("static", "perturbed", "pair", "sweep")


class UsageError(SuperarrivalsError):
    pass


@dataclass
class RunManifest:
    config_path: Path | None = None
    out_dir: Path = Path("out")
    mode: str = "pair"
    N_list: list[int] = field(default_factory=lambda: list(DEFAULT_N_LIST))
    snapshot_times: list[float] | None = None
    threshold: float = analysis.DEFAULT_THRESHOLD
    D_convention: str | None = None
    jobs: int | None = None

    def load(self) -> SimulationConfig:
        config = default_config() if self.config_path is None else load_config(self.config_path)
        if self.D_convention is not None:
            D = detector_distance(self.D_convention, config.barrier, config.x_prime)
            config = config.replace(detector_D=D)
        return config


def _write_run(out: Path, result: SimulationResult, single: bool) -> None:
    result.trace.write_csv(out / f"trace_{result.tag}.csv")
    for t, wf in result.snapshots:
        name = f"snapshot_{fmt(t)}.csv" if single else f"snapshot_{fmt(t)}_{result.tag}.csv"
        write_snapshot(out / name, wf)


def _static_summary(config: SimulationConfig, result: SimulationResult) -> str:
    """Dynamic asymptote next to the stationary plane-wave prediction."""
    lines = []
    try:
        asym = asymptotic_reflection(result.trace)
        lines += [f"R0_dynamic={fmt(asym.value)}", f"flatness={fmt(asym.flatness)}"]
    except NotAsymptoticError as exc:
        log.warning("%s", exc)
        lines.append("R0_dynamic=nan")
    wf = gaussian_packet(config.grid, config.x0, config.sigma0, config.p0)
    spectrum = momentum_spectrum(wf, config.p0, config.sigma0)
    spec = BarrierSpec(config.barrier.V0, config.barrier.width, config.mass)
    lines.append(f"R0_planewave={fmt(momentum_integrated_reflection(spectrum, spec))}")
    lines.append(f"max_norm_drift={fmt(np.max(np.abs(result.trace.norm - 1.0)))}")
    lines.append(f"wall_probability={fmt(result.wall_probability)}")
    return "\n".join(lines) + "\n"


def _run_many(configs, snapshot_times, jobs):
    jobs = max(1, jobs or len(configs))
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run, c, snapshot_times) for c in configs]
        return [f.result() for f in futures]


def cmd_run(manifest: RunManifest) -> int:
    """Run a static, perturbed or paired simulation and write its outputs."""
    config = manifest.load()
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snaps = manifest.snapshot_times

    if manifest.mode == "static":
        cfg = config.static()
        result = run(cfg, snaps)
        _write_run(out, result, single=True)
        summary = _static_summary(cfg, result)
        (out / "asymptote.kv").write_text(summary, encoding="utf-8")
        sys.stdout.write(summary)
        return EXIT_OK

    N = _single_N(manifest.N_list)
    if manifest.mode == "perturbed":
        result = run(config.perturbed(N), snaps)
        _write_run(out, result, single=True)
        return EXIT_OK

    if manifest.mode != "pair":
        raise UsageError(f"cmd_run cannot handle mode {manifest.mode!r}")
    run_s, run_p = _run_many([config.static(), config.perturbed(N)], snaps, manifest.jobs)
    for r in (run_s, run_p):
        _write_run(out, r, single=False)
    report = analysis.build_report(run_s, run_p, threshold=manifest.threshold)
    (out / "report.txt").write_text(analysis.format_report([report]), encoding="utf-8")
    (out / "report.kv").write_text(analysis.format_kv(report), encoding="utf-8")
    sys.stdout.write(analysis.format_report([report]))
    return EXIT_OK


def _single_N(N_list) -> int:
    if not N_list:
        raise UsageError("--N needs a ramp step count")
    if len(N_list) != 1:
        raise UsageError("run modes take exactly one --N value; use sweep for several")
    return _check_N(N_list[0])


def _check_N(N) -> int:
    if N < 1:
        raise UsageError(f"ramp step count must be >= 1, got {N}")
    return int(N)


def cmd_sweep(manifest: RunManifest) -> int:
    """One static run plus one perturbed run per N; writes traces and tables."""
    if not manifest.N_list:
        raise UsageError("sweep needs at least one --N value")
    N_list = [_check_N(n) for n in manifest.N_list]
    config = manifest.load()
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    configs = [config.static()] + [config.perturbed(N) for N in N_list]
    jobs = manifest.jobs or len(N_list)
    results = []
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(run, c, manifest.snapshot_times) for c in configs]
        for fut in futures:
            # Each finished run is written before the next failure can abort the sweep.
            result = fut.result()
            _write_run(out, result, single=False)
            results.append(result)

    run_s, perturbed = results[0], results[1:]
    reports = []
    for r in perturbed:
        report = analysis.build_report(run_s, r, threshold=manifest.threshold)
        (out / f"report_N{report.N}.kv").write_text(analysis.format_kv(report), encoding="utf-8")
        reports.append(report)
    (out / "table1.txt").write_text(analysis.table1(reports), encoding="utf-8")
    (out / "table2.txt").write_text(analysis.table2(reports), encoding="utf-8")
    (out / "table3.txt").write_text(analysis.table3(reports), encoding="utf-8")
    sys.stdout.write(analysis.format_report(reports))
    return EXIT_OK


def cmd_planewave(spec: BarrierSpec, p_range, out_path) -> int:
    """Write the analytic |R(p)|^2 curve over ``p_range = (p_min, p_max, n)``."""
    p_min, p_max, n = p_range
    if not (0 < p_min <= p_max) or n < 1 or (n > 1 and p_min == p_max):
        raise UsageError(f"invalid momentum range {p_min}..{p_max} with {n} points")
    p = np.linspace(p_min, p_max, int(n))
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_reflection_curve(out_path, p, spec)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_or_pi(text: str) -> float:
    """Parse a float, allowing a trailing 'pi' multiplier (e.g. '50pi')."""
    text = text.strip()
    if text.endswith("pi"):
        head = text[:-2].rstrip("*") or "1"
        return float(head) * math.pi
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="superarrivals", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", type=Path, help="key=value config file (default: canonical run)")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--threshold", type=float, default=analysis.DEFAULT_THRESHOLD,
                       help="absolute |R|^2 gap that marks the deviation time")
        p.add_argument("--D-convention", choices=("edge", "center"), dest="D_convention",
                       help="measure the detector distance from the barrier edge or centre")
        p.add_argument("--snapshot-at", type=float, nargs="+", dest="snapshot_at",
                       metavar="T", help="snapshot times (default: 0, t_p, final)")
        p.add_argument("--jobs", type=int, help="parallel runs")

    p_run = sub.add_parser("run", help="static, perturbed or paired run")
    common(p_run)
    p_run.add_argument("--mode", choices=("static", "perturbed", "pair"), default="pair")
    p_run.add_argument("--N", type=int, nargs="+", default=[2], help="ramp step count")

    p_sweep = sub.add_parser("sweep", help="static run plus one perturbed run per N")
    common(p_sweep)
    p_sweep.add_argument("--N", type=int, nargs="*", default=list(DEFAULT_N_LIST))

    p_pw = sub.add_parser("planewave", help="analytic plane-wave reflection curve")
    p_pw.add_argument("--config", type=Path, help="take barrier and mass from this config")
    p_pw.add_argument("--V0", type=float, help="barrier height (default: config value)")
    p_pw.add_argument("--width", type=float, help="barrier width (default: config value)")
    p_pw.add_argument("--p-min", type=_float_or_pi, default=1.0)
    p_pw.add_argument("--p-max", type=_float_or_pi, default=100 * math.pi)
    p_pw.add_argument("--points", type=int, default=2001)
    p_pw.add_argument("--out", type=Path, default=Path("planewave.csv"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "planewave":
            config = default_config() if args.config is None else load_config(args.config)
            spec = BarrierSpec(
                V0=config.barrier.V0 if args.V0 is None else args.V0,
                width=config.barrier.width if args.width is None else args.width,
                mass=config.mass,
            )
            return cmd_planewave(spec, (args.p_min, args.p_max, args.points), args.out)

        manifest = RunManifest(
            config_path=args.config,
            out_dir=args.out,
            mode=getattr(args, "mode", "sweep"),
            N_list=list(args.N),
            snapshot_times=args.snapshot_at,
            threshold=args.threshold,
            D_convention=args.D_convention,
            jobs=args.jobs,
        )
        if args.command == "sweep":
            return cmd_sweep(manifest)
        return cmd_run(manifest)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalBreakdown, DetectionError, NotAsymptoticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
