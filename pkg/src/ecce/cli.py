"""Command-line entry point: ``ecce <subcommand> ...``.

Exit status is 0 on success, 1 on invalid input or usage, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import DegenerateScoresError, ValidationError
from .experiments import SizeSweepConfig, bootstrap_band, sweep_bins, sweep_n
from .fileio import (
    InputOutputError,
    ReportDocument,
    atomic_write,
    ece_section,
    ecce_section,
    read_csv,
    sweep_to_csv,
    write_csv,
)
from .metrics import BinningSpec, assign_bins, canonicalize, cumulative_curve, ece, ecce
from .plots import PlotKind, PlotSpec, cumulative_plot, reliability_diagram, sweep_plot
from .synth import CalibrationFunction, GridKind, ScoreGrid, SynthConfig, generate


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be at least 1")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [_positive_int(t) for t in text.split(",") if t.strip()]
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad list {text!r}: {exc}")


def parse_calibration(text: str) -> CalibrationFunction:
    """``perfect`` or ``sine:amp=A,freq=W``."""
    if text == "perfect":
        return CalibrationFunction.perfect()
    kind, _, params = text.partition(":")
    if kind != "sine":
        raise argparse.ArgumentTypeError(f"unknown calibration {text!r}")
    values = {"amp": "0.1", "freq": "2"}
    for item in filter(None, params.split(",")):
        key, eq, val = item.partition("=")
        if not eq or key not in values:
            raise argparse.ArgumentTypeError(f"bad calibration parameter {item!r}")
        values[key] = val
    try:
        return CalibrationFunction.sine(float(values["amp"]), int(values["freq"]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ecce", description="Calibration errors, cumulative statistics and plots.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_args(sp, bins=False):
        sp.add_argument("--input", required=True, help="CSV with header score,response")
        sp.add_argument("--seed", type=int, default=0, help="seed for breaking tied scores")
        if bins:
            sp.add_argument("--bins", type=_positive_int, required=True)
            sp.add_argument("--strategy", choices=["equispaced", "equal-count"], default="equispaced")

    sp = sub.add_parser("compute", help="ECE, ECCE and P-values")
    data_args(sp, bins=True)
    sp.add_argument("--json")

    sp = sub.add_parser("cumulative", help="cumulative plot and ECCE report")
    data_args(sp)
    sp.add_argument("--svg")
    sp.add_argument("--json")

    sp = sub.add_parser("reliability", help="reliability diagram")
    data_args(sp, bins=True)
    sp.add_argument("--bootstrap", type=int, default=0, metavar="CURVES")
    sp.add_argument("--svg")

    sp = sub.add_parser("synth", help="draw a synthetic dataset")
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--grid", choices=[g.value for g in GridKind], required=True)
    sp.add_argument("--calibration", type=parse_calibration, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--output", required=True)

    sp = sub.add_parser("sweep-bins", help="ECEs over a list of bin counts")
    data_args(sp)
    sp.add_argument("--bins", type=_int_list, required=True)
    sp.add_argument("--csv")
    sp.add_argument("--svg")

    sp = sub.add_parser("sweep-n", help="synthetic metrics over sample sizes")
    sp.add_argument("--sizes", type=_int_list, default=list(SizeSweepConfig.sizes))
    sp.add_argument("--realizations", type=_positive_int, default=9)
    sp.add_argument("--draws-per-bin", type=_positive_int, default=16)
    sp.add_argument("--grids", default=",".join(g.value for g in GridKind))
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--csv")
    sp.add_argument("--svg")
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _load(args):
    return canonicalize(read_csv(args.input), seed=args.seed)


def _provenance(args, **extra) -> dict:
    return {"input": args.input, "seed": args.seed, "tool_version": __version__, **extra}


def cmd_compute(args) -> int:
    ds = _load(args)
    binned = ece(ds, BinningSpec(args.strategy, args.bins))
    try:
        cum = ecce_section(ecce(ds))
    except DegenerateScoresError as exc:
        cum = {"error": str(exc)}
    doc = ReportDocument(ds.n, _provenance(args), [ece_section(binned)], cum)
    _emit(doc.to_json(), args.json)
    return 0


def cmd_cumulative(args) -> int:
    ds = _load(args)
    rep = ecce(ds)
    doc = ReportDocument(ds.n, _provenance(args), ecce_section=ecce_section(rep))
    svg = None
    if args.svg:
        spec = PlotSpec(title=f"cumulative differences, n = {ds.n}", xlabel="k/n",
                        ylabel="Cₖ", kind=PlotKind.CUMULATIVE)
        svg = cumulative_plot(cumulative_curve(ds), rep.sigma_n, spec, report=rep)
    if svg is not None:
        atomic_write(args.svg, svg)
    _emit(doc.to_json(), args.json)
    return 0


def cmd_reliability(args) -> int:
    ds = _load(args)
    spec = BinningSpec(args.strategy, args.bins)
    if args.bootstrap < 0:
        raise ValidationError("--bootstrap must be nonnegative")
    band = bootstrap_band(ds, spec, args.bootstrap, seed=args.seed) if args.bootstrap else None
    plot = PlotSpec(title=f"reliability diagram, {args.strategy} bins, m = {args.bins}",
                    xlabel="average score", ylabel="average response")
    _emit(reliability_diagram(assign_bins(ds, spec), band, plot), args.svg)
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(ScoreGrid(args.grid, args.n), args.calibration, args.seed)
    write_csv(generate(cfg).pairs(), args.output)
    return 0


def cmd_sweep_bins(args) -> int:
    ds = _load(args)
    result = sweep_bins(ds, args.bins)
    if args.svg:
        atomic_write(args.svg, sweep_plot(result, PlotSpec(title="ECE against number of bins",
                                                           xlabel="number of bins", kind="sweep")))
    _emit(sweep_to_csv(result), args.csv)
    return 0


def cmd_sweep_n(args) -> int:
    grids = [g for g in args.grids.split(",") if g]
    try:
        grids = tuple(GridKind(g) for g in grids)
    except ValueError:
        raise ValidationError(f"unknown grid in {args.grids!r}")
    cfg = SizeSweepConfig(sizes=tuple(args.sizes), realizations=args.realizations,
                          draws_per_bin=args.draws_per_bin, master_seed=args.seed, grids=grids)
    result = sweep_n(cfg)
    if args.svg:
        atomic_write(args.svg, sweep_plot(result, PlotSpec(title="averages over realizations",
                                                           xlabel="n", kind="sweep")))
    _emit(sweep_to_csv(result), args.csv)
    return 0


COMMANDS = {
    "compute": cmd_compute,
    "cumulative": cmd_cumulative,
    "reliability": cmd_reliability,
    "synth": cmd_synth,
    "sweep-bins": cmd_sweep_bins,
    "sweep-n": cmd_sweep_n,
}


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except ValidationError as exc:
        sys.stderr.write(f"ecce: error: {exc}\n")
        return 1
    except (InputOutputError, OSError) as exc:
        sys.stderr.write(f"ecce: I/O error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
