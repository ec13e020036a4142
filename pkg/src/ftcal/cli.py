"""Command-line interface.

Exit codes: 0 success, 1 user or data error, 2 internal numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .dynamics import synthesize_dataset
from .errors import CalibrationError, NumericalFailure
from .estimation import calibrate
from .validation import (
    DEFAULT_LAMBDAS,
    Candidate,
    assemble_mixed,
    cross_table,
    error_percentage,
    lambda_sweep,
    residual_external_wrench,
)


def _write_report(prefix, name, header, rows, text_spec=".4f"):
    base = Path(prefix)
    base.parent.mkdir(parents=True, exist_ok=True)
    io._write(f"{base}{name}.csv", io.format_csv(header, rows))
    return io.format_text_table(header, rows, text_spec)


def cmd_generate(args):
    cfg = io.read_config(args.config)
    truth = cfg.truth if args.seed is None else replace(cfg.truth, seed=args.seed)
    d = synthesize_dataset(cfg.body, cfg.spec, truth, cfg.name, kind=cfg.kind,
                           flip_sign=cfg.flip_sign or args.flip_sign)
    io.write_dataset(d, args.output)
    print(f"wrote {len(d)} samples to {args.output}")


def cmd_calibrate(args):
    datasets = [io.read_dataset(p) for p in args.datasets]
    workbench = io.read_calibration(args.workbench).model
    lam = io.parse_lambda(args.lam)
    model, offsets = calibrate(datasets, workbench.matrix, lam, args.offset, label=args.label)
    cf = io.CalibrationFile(model, lam, [d.name for d in datasets],
                            offsets if len(datasets) > 1 else {})
    io.write_calibration(cf, args.output)
    print(f"wrote calibration {model.label!r} to {args.output}")


def cmd_crosstab(args):
    workbench = io.read_calibration(args.workbench).model.with_label("Workbench")
    models = [workbench] + [io.read_calibration(p).model for p in args.models]
    datasets = [io.read_dataset(p) for p in args.datasets]
    table = cross_table(models, datasets, workbench, args.offset, args.metric)
    header, wide, long_header, long_rows = io.crosstab_tables(table)
    text = _write_report(args.output, "", header, wide, ".2f")
    _write_report(args.output, "_axes", long_header, long_rows)
    discarded = table.discarded()
    if discarded:
        text += "discarded (worse than Workbench): " + ", ".join(discarded) + "\n"
    io._write(f"{args.output}.txt", text)
    sys.stdout.write(text)
    if table.all_failed():
        print("every cell failed", file=sys.stderr)
        return 1
    return 0


def _parse_grid(text):
    if text is None:
        return list(DEFAULT_LAMBDAS)
    vals = [float(v) for v in text.replace(" ", "").split(",") if v]
    if not vals:
        raise CalibrationError("empty --lambda-grid")
    return vals


def cmd_sweep(args):
    workbench = io.read_calibration(args.workbench).model
    test = io.read_dataset(args.test)
    train_sets = [io.read_dataset(p) for p in args.train]
    lambdas = _parse_grid(args.lambda_grid)
    wb_result = residual_external_wrench(workbench, test, args.offset, train_name="Workbench")

    results, discarded, unscreened, failed = [], [], [], []
    every = train_sets + [test]
    for d in train_sets:
        try:
            if not args.keep_discarded:
                # screen: the unregularized matrix must not do worse than the Workbench
                try:
                    base, _ = calibrate([d], workbench.matrix, 0.0, args.offset)
                    agg = [error_percentage(base, workbench, e, args.offset).aggregate for e in every]
                except CalibrationError as exc:
                    if isinstance(exc, NumericalFailure):
                        raise
                    unscreened.append(f"{d.name}: {exc}")
                else:
                    if np.mean(agg) > 100.0:
                        discarded.append(d.name)
                        continue
            results += lambda_sweep(d, test, workbench, lambdas, args.offset)
        except CalibrationError as exc:
            if isinstance(exc, NumericalFailure):
                raise
            failed.append(f"{d.name}: {exc}")

    header, rows, dheader, drows = io.sweep_tables(results, lambdas, wb_result)
    text = _write_report(args.output, "", header, rows)
    _write_report(args.output, "_detail", dheader, drows)
    for name in discarded:
        text += f"discarded (worse than Workbench): {name}\n"
    for msg in unscreened:
        text += f"not screened (no unregularized matrix) {msg}\n"
    for msg in failed:
        text += f"NA {msg}\n"
    io._write(f"{args.output}.txt", text)
    sys.stdout.write(text)

    if args.models_dir:
        out = Path(args.models_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            path = out / f"{r.train_name}_lam{format(r.lam, 'g')}.cal"
            io.write_calibration(io.CalibrationFile(r.model, r.lam, [r.train_name]), path)
    if not results:
        print("no matrix could be evaluated", file=sys.stderr)
        return 1
    return 0


def cmd_mix(args):
    files = [io.read_calibration(p) for p in args.models]
    candidates = []
    for cf in files:
        name = "+".join(cf.trained_on) if cf.trained_on else cf.model.label
        candidates.append(Candidate(cf.model, name, 0.0 if cf.lam is None else cf.lam))
    selection = io.read_dataset(args.selection)
    mixed = assemble_mixed(candidates, selection=selection, offset_method=args.offset,
                           metric=args.metric, label=args.label)
    header, rows = io.mixed_table(mixed)
    text = _write_report(args.output, "", header, rows)
    io._write(f"{args.output}.txt", text)
    lam = np.array([lam for _, lam, _ in mixed.rows])
    lam = float(lam[0]) if np.all(lam == lam[0]) else lam
    sources = sorted({src for src, _, _ in mixed.rows})
    io.write_calibration(io.CalibrationFile(mixed.assembled, lam, sources), f"{args.output}.cal")
    sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="ftcal", description="In-situ calibration of six-axis F/T sensors.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_offset(p):
        p.add_argument("--offset", choices=("centralized", "insitu"), default="centralized",
                       help="offset removal applied to every dataset (default: centralized)")

    p = sub.add_parser("generate", help="synthesize a dataset from a key=value config")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config noise seed")
    p.add_argument("--flip-sign", action="store_true", help="negate the reference wrench convention")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("calibrate", help="regularized in-situ calibration on one or more datasets")
    p.add_argument("datasets", nargs="+")
    p.add_argument("--workbench", required=True, help="prior (Workbench) calibration file")
    p.add_argument("--lambda", dest="lam", default="0",
                   help="regularization weight, or six comma-separated per-axis weights")
    p.add_argument("--label", default=None)
    common_offset(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("crosstab", help="error-percentage table of matrices against datasets")
    p.add_argument("--workbench", required=True)
    p.add_argument("--models", nargs="*", default=[])
    p.add_argument("--datasets", nargs="+", required=True)
    p.add_argument("--metric", choices=("rms", "mae"), default="rms")
    common_offset(p)
    p.add_argument("-o", "--output", required=True, help="output prefix")
    p.set_defaults(func=cmd_crosstab)

    p = sub.add_parser("sweep", help="residual external force over a lambda grid")
    p.add_argument("train", nargs="+")
    p.add_argument("--test", required=True)
    p.add_argument("--workbench", required=True)
    p.add_argument("--lambda-grid", default=None, help="comma-separated weights (default: 0.5,1,1.5,2,4,6,8,10)")
    p.add_argument("--keep-discarded", action="store_true",
                   help="also sweep training sets whose unregularized matrix is worse than the Workbench")
    p.add_argument("--models-dir", default=None, help="write every swept matrix here")
    common_offset(p)
    p.add_argument("-o", "--output", required=True, help="output prefix")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mix", help="assemble the per-axis best matrix")
    p.add_argument("models", nargs="+")
    p.add_argument("--selection", required=True, help="dataset used to rank candidate rows")
    p.add_argument("--metric", choices=("rms", "mae"), default="mae")
    p.add_argument("--label", default="mixed")
    common_offset(p)
    p.add_argument("-o", "--output", required=True, help="output prefix")
    p.set_defaults(func=cmd_mix)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except NumericalFailure as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (CalibrationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
