"""Command-line front end: ``spectrum``, ``sweep`` and ``validate`` subcommands.

Exit codes: 0 success, 2 configuration error, 3 numerical error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass

from .basis import total_dimension
from .config import PRESET_HELP, PRESETS, ConfigError, RunConfig, parse_config, parse_grid
from .hamiltonian import AggregateConfig
from .oracle import compare, oracle_spectrum, site_dimension
from .response import FrequencyGrid, SingularBlockError, compute_spectrum, spectrum, sweep
from .vibronic import DisplacedOscillatorSpec, build_model, lambda_model

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

VALIDATE_TOLERANCE = 1e-8


def _err(msg: str) -> None:
    print(f"aggspec: error: {msg}", file=sys.stderr)


def _write_output(text: str, path: str | None) -> None:
    """Write atomically so a failure never leaves a partial file behind."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".aggspec-", suffix=".tmp")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from None
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        os.unlink(tmp)
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from None


def run_spectrum(cfg: RunConfig) -> int:
    spec = compute_spectrum(
        cfg.model, cfg.aggregate, cfg.grid, cfg.methods, threads=cfg.threads, max_dim=cfg.max_dim
    )
    _write_output(spec.to_text(), cfg.out)
    return EXIT_OK


def run_sweep(cfg: RunConfig) -> int:
    if cfg.sweep is None:
        raise ConfigError("sweep needs a [sweep] section (coupling_min, coupling_max, count)")
    surface = sweep(
        cfg.model,
        cfg.aggregate,
        cfg.sweep.axis,
        cfg.vib_freq,
        cfg.grid,
        k_max=cfg.sweep.k_max,
        threads=cfg.threads,
    )
    _write_output(surface.to_text(), cfg.out)
    return EXIT_OK


@dataclass(frozen=True)
class ValidationCase:
    name: str
    model: object
    config: AggregateConfig


def validation_suite() -> list[ValidationCase]:
    """Symmetric-vs-site cases; gamma_v = 0 so both sides share one damping."""

    def displaced(m_g, m_e):
        return build_model(DisplacedOscillatorSpec(0.16, 0.5, 2.3, m_g, m_e))

    return [
        ValidationCase("dimer-pdi", lambda_model(), AggregateConfig(1, -0.06, 0.01, 0.0)),
        ValidationCase("S0.5 N+1=2 Mg+1=2 Me+1=2", displaced(1, 1), AggregateConfig(1, -0.06, 0.01, 0.0)),
        ValidationCase("S0.5 N+1=3 Mg+1=2 Me+1=2", displaced(1, 1), AggregateConfig(2, -0.06, 0.01, 0.0)),
        ValidationCase("S0.5 N+1=3 Mg+1=3 Me+1=2", displaced(2, 1), AggregateConfig(2, -0.06, 0.01, 0.0)),
        ValidationCase("S0.5 N+1=4 Mg+1=3 Me+1=3 J>0", displaced(2, 2), AggregateConfig(3, 0.04, 0.01, 0.0)),
        ValidationCase("uncoupled N+1=3", displaced(2, 2), AggregateConfig(2, 0.0, 0.01, 0.0)),
    ]


def run_validate(grid: FrequencyGrid | None = None, tolerance: float = VALIDATE_TOLERANCE, threads: int = 1):
    """Return ``(exit_code, report_text)``."""
    grid = grid or FrequencyGrid(2.3 - 4 * 0.16, 2.3 + 4 * 0.16, 2001)
    header = f"{'case':<32}{'sym_dim':>8}{'site_dim':>10}{'max_abs':>13}{'max_rel':>13}  status"
    lines = [f"# symmetric basis vs site basis, tolerance {tolerance:.3e} (max abs)", header]
    failed = 0
    for case in validation_suite():
        sym = spectrum(case.model, case.config, grid, threads=threads)
        ref = oracle_spectrum(case.model, case.config, grid)
        dev = compare(sym, ref)
        ok = dev.passes(tolerance)
        failed += not ok
        lines.append(
            f"{case.name:<32}"
            f"{total_dimension(case.config.n_ground, case.model.m_g, case.model.m_e):>8d}"
            f"{site_dimension(case.model, case.config):>10d}"
            f"{dev.max_abs:>13.3e}{dev.max_rel:>13.3e}  {'PASS' if ok else 'FAIL'}"
        )
    total = len(lines) - 2
    lines.append(f"# {total - failed}/{total} passed")
    return (EXIT_VALIDATION if failed else EXIT_OK), "\n".join(lines) + "\n"


def _preset_epilog() -> str:
    rows = "\n".join(f"  {name:<11} {PRESET_HELP[name]}" for name in PRESETS)
    return f"presets:\n{rows}\n\nexit codes: 0 ok, 2 config error, 3 numerical error, 4 validation failure"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [monomer] [aggregate] [grid] [output] sections")
    common.add_argument("--preset", choices=sorted(PRESETS), help="compiled-in scenario")
    common.add_argument("--methods", help="comma list of exact, cpa, order:<k>")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--grid", help="start,stop,count in eV")
    common.add_argument("--threads", type=int, help="worker threads for the frequency grid")
    common.add_argument(
        "--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override one config key"
    )
    common.add_argument("--print-config", action="store_true", help="print the expanded config and exit")

    parser = argparse.ArgumentParser(
        prog="aggspec",
        description="Absorption spectra of all-to-all coupled permutationally symmetric aggregates.",
        epilog=_preset_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="exact / truncated / CPA spectra")
    sub.add_parser("sweep", parents=[common], help="log-intensity map over NJ/omega_v")
    val = sub.add_parser("validate", help="compare the symmetric engine with the site-basis oracle")
    val.add_argument("--grid", help="start,stop,count in eV")
    val.add_argument("--tolerance", type=float, default=VALIDATE_TOLERANCE)
    val.add_argument("--threads", type=int, default=1)
    val.add_argument("--out", help="report file (default: stdout)")
    return parser


def _load(args) -> RunConfig:
    overrides = list(args.set)
    if args.grid:
        overrides += [f"grid.{k}={v}" for k, v in parse_grid(args.grid).items()]
    if args.methods:
        overrides.append(f"output.methods={args.methods}")
    if args.out:
        overrides.append(f"output.path={args.out}")
    if args.threads is not None:
        overrides.append(f"compute.threads={args.threads}")
    return parse_config(args.config, args.preset, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            grid = None
            if args.grid:
                g = parse_grid(args.grid)
                try:
                    grid = FrequencyGrid(float(g["start"]), float(g["stop"]), int(g["count"]))
                except ValueError as exc:
                    raise ConfigError(f"--grid: {exc}") from None
            code, report = run_validate(grid, args.tolerance, args.threads)
            _write_output(report, args.out)
            if code:
                _err("validation failed: deviation above tolerance")
            return code
        cfg = _load(args)
        if args.print_config:
            sys.stdout.write(cfg.to_ini())
            return EXIT_OK
        if args.command == "spectrum":
            return run_spectrum(cfg)
        return run_sweep(cfg)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except (SingularBlockError, MemoryError, ArithmeticError, ValueError) as exc:
        _err(str(exc))
        return EXIT_NUMERICAL
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
