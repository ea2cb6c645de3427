"""Command line: simulate, fig2, fig3, sweep, validate.

Exit codes: 0 success, 1 usage or config error, 2 validation failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ScenarioConfig, parse_config
from .model import DomainError
from .runner import (
    ScenarioError,
    emit_csv,
    run_fig2,
    run_fig3,
    run_scenario,
    run_sweep,
    write_summary_json,
    write_sweep_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _IOFailure(Exception):
    pass


def parse_range(text: str) -> np.ndarray:
    """``a:b:n`` -> n evenly spaced values from a to b inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("n must be >= 1")
    return np.linspace(a, b, n)


def load_config(path: str) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"{path}: {exc.strerror or exc}") from None
    return parse_config(text)


def _outdir(args, cfg: ScenarioConfig | None = None) -> Path:
    if args.output is not None:
        return Path(args.output)
    return Path(cfg.output.directory) if cfg is not None else Path(".")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.detector_offset is not None:
        cfg = cfg.with_values(output__detector_offset=args.detector_offset)
    if args.absolute:
        cfg = cfg.with_values(output__absolute=True)
    result = run_scenario(cfg, base_dir=Path(args.config).parent)
    out = _outdir(args, cfg)
    stem = Path(args.config).stem
    csv_path = emit_csv(result, out / f"{stem}.csv")
    write_summary_json(result, out / f"{stem}.summary.json")
    print(f"wrote {csv_path} ({result.psi.grid.n_steps} rows)")
    for key, value in result.summary.items():
        print(f"  {key} = {value:.6g}")
    return EXIT_OK


def cmd_figure(args) -> int:
    out = _outdir(args)
    runs = run_fig2(out) if args.command == "fig2" else run_fig3(out)
    for key, res in runs.items():
        print(f"{args.command} {key}: delta={res.packet.delta:g} linewidth={res.packet.linewidth:g} "
              f"max|shift|={res.summary['max_abs_shift']:.6g}")
    print(f"wrote {len(runs)} files to {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    rows = run_sweep(cfg, args.delta, args.linewidth, parallel=not args.serial,
                     base_dir=Path(args.config).parent)
    path = write_sweep_csv(rows, _outdir(args, cfg) / f"{Path(args.config).stem}.sweep.csv")
    failed = sum(1 for r in rows if r["error"])
    print(f"wrote {path} ({len(rows)} rows, {failed} with errors)")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_validation

    results = run_validation(args.dt)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stark-packet",
                     description="Single-photon packet scattering on a two-level emitter in a waveguide.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one scenario and write CSV + summary JSON")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output directory (default: output.directory)")
    p.add_argument("--absolute", action="store_true", help="export omega0 + shift")
    p.add_argument("--detector-offset", type=float, default=None)
    p.set_defaults(func=cmd_simulate)

    for name, text in (("fig2", "shift series for the three reference (delta, linewidth) triples"),
                       ("fig3", "dynamic vs static difference signals")):
        p = sub.add_parser(name, help=text)
        p.add_argument("-o", "--output", default=None)
        p.set_defaults(func=cmd_figure)

    p = sub.add_parser("sweep", help="summary table over a (delta, linewidth) grid")
    p.add_argument("config")
    p.add_argument("--delta", type=parse_range, required=True, metavar="A:B:N")
    p.add_argument("--linewidth", type=parse_range, required=True, metavar="A:B:N")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--serial", action="store_true", help="disable the worker pool")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run every self-check and report measured vs tolerance")
    p.add_argument("--dt", type=float, default=1e-3, help="working step for the convergence study")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ScenarioError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
