"""``vocbench`` command line interface.

Exit codes: 0 success, 1 usage or parse error, 2 invariant violation in the
data, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .calibration import DEFAULT_N_BINS, accuracy, apply_rescale, discrimination, ece, isotonic_rescale
from .core import (
    Penalty,
    VocError,
    apply_threshold,
    count_outcomes,
    dimensionless_value,
    raw_value,
)
from .discriminator import apply_discriminator, train_bin_remap
from .io import (
    DataError,
    ParseError,
    discriminator_from_json,
    discriminator_to_json,
    distribution_from_json,
    distribution_to_json,
    dumps,
    fmt,
    format_curve,
    format_rescale,
    json_number,
    parse_rescale,
    read_predictions,
    read_usecase,
    usecase_to_json,
    write_predictions,
    _write_text,
)
from .plot import render_svg
from .synth import POPULATION, PRESETS, SAMPLE, preset, realize
from .threshold import calibrated_threshold, optimize_threshold
from .voc import INF, fixed_voc, omega_aware_voc, omega_sup, voc_auc

log = logging.getLogger("vocbench")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
DEFAULT_BANDS = ("0:1", "1:sup")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers ----------------------------------------------------------------

def _emit(obj, out: str | None) -> None:
    text = dumps(obj)
    if out:
        _write_text(out, text)
    else:
        sys.stdout.write(text)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _parse_band(band_text: str, sup: float):
    """``lo:hi`` where hi may be a number, ``inf`` or ``sup`` (the curve's omega_sup)."""
    try:
        lo_s, hi_s = band_text.split(":")
        lo = float(lo_s)
        hi = sup if hi_s == "sup" else float(hi_s)
    except ValueError:
        raise UsageError(f"bad band {band_text!r}; expected lo:hi") from None
    return lo, hi


def _band_key(lo: float, hi: float) -> str:
    return f"[{fmt(lo)},{fmt(hi)})"


def _auc_table(curve, bands) -> dict:
    sup = omega_sup(curve)
    table = {_band_key(0.0, INF): json_number(voc_auc(curve))}
    for band_text in bands:
        lo, hi = _parse_band(band_text, sup)
        # an empty band (e.g. [1, sup) with sup <= 1) has zero area
        table[_band_key(lo, hi)] = 0.0 if hi <= lo else json_number(voc_auc(curve, (lo, hi)))
    return table


def _curve_json(curve, bands) -> dict:
    return {
        "mode": curve.mode,
        "pieces": [
            {"omega_start": s, "intercept_a": a, "slope_b": b, "threshold": t}
            for s, a, b, t in curve.rows()
        ],
        "omega_sup": json_number(omega_sup(curve)),
        "auc": _auc_table(curve, bands),
    }


def _same_file(a, b) -> bool:
    try:
        return os.path.samefile(a, b)
    except OSError:
        return False


def _seed_default() -> int:
    raw = os.environ.get("VOCBENCH_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"VOCBENCH_SEED must be an integer, got {raw!r}") from None


# -- subcommands ------------------------------------------------------------

def cmd_eval(args) -> dict:
    data = read_predictions(args.pred)
    penalty, usecase = read_usecase(args.usecase)
    counts = count_outcomes(apply_threshold(data, args.threshold))
    out = {
        "threshold": args.threshold,
        "omega": penalty.omega,
        "counts": counts.as_floats(),
        "dimensionless_value": dimensionless_value(counts, penalty),
    }
    if usecase is not None:
        out["raw_value"] = raw_value(counts, usecase)
    return out


def _optimize_one(val, test, omega: float) -> dict:
    res = optimize_threshold(val, omega)
    row = {
        "omega": omega,
        "threshold": res.threshold,
        "calibrated_threshold": calibrated_threshold(omega),
        "validation_value": res.achieved_value,
        "accepted_weight": res.accepted_weight,
    }
    if test is not None:
        counts = count_outcomes(apply_threshold(test, res.threshold))
        row["test_value"] = dimensionless_value(counts, omega)
        row["test_counts"] = counts.as_floats()
    return row


def cmd_optimize(args) -> dict:
    val = read_predictions(args.val)
    test = None
    if args.test:
        if _same_file(args.val, args.test):
            log.warning("validation and test files are the same; the reported test value is in-sample")
        test = read_predictions(args.test)
    penalty, _ = read_usecase(args.usecase)
    return _optimize_one(val, test, penalty.omega)


def cmd_voc(args) -> dict:
    bands = args.band if args.band is not None else list(DEFAULT_BANDS)
    curves, labels, entries = [], [], []
    for path in args.pred:
        data = read_predictions(path)
        if args.mode == "fixed":
            curve = fixed_voc(count_outcomes(apply_threshold(data, args.threshold)), args.threshold)
        else:
            curve = omega_aware_voc(data)
        curves.append(curve)
        labels.append(Path(path).stem)
        entries.append({"pred": path, **_curve_json(curve, bands)})
    if args.out_csv:
        for path, curve in zip(args.pred, curves):
            target = args.out_csv
            if len(args.pred) > 1:
                p = Path(args.out_csv)
                target = str(p.with_name(f"{p.stem}-{Path(path).stem}{p.suffix}"))
            _write_text(target, format_curve(curve))
    if args.out_svg:
        _write_text(args.out_svg, render_svg(curves, labels, args.omega_max, title=f"VOC ({args.mode})"))
    return {"omega_max": args.omega_max, "curves": entries}


def build_report(args) -> dict:
    test = read_predictions(args.pred)
    val = test
    if args.val:
        if _same_file(args.val, args.pred):
            log.warning("validation and test files are the same; thresholds are fitted in-sample")
        val = read_predictions(args.val)
    else:
        log.warning("no --val given; thresholds are fitted on the test predictions")
    penalty, usecase = read_usecase(args.usecase)
    h_json = None
    if args.discriminator:
        h = discriminator_from_json(_read_json(args.discriminator), args.discriminator)
        h_json = discriminator_to_json(h)
        test = apply_discriminator(test, h)
        val = apply_discriminator(val, h)

    omegas = [penalty.omega] + [w for w in (args.omega or []) if w != penalty.omega]
    for w in omegas:
        Penalty(w)
    bands = args.band if args.band is not None else list(DEFAULT_BANDS)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(lambda w: _optimize_one(val, test, w), omegas))

    curve = omega_aware_voc(test)
    best = rows[0]
    fixed = fixed_voc(count_outcomes(apply_threshold(test, best["threshold"])), best["threshold"])
    disc = discrimination(test)
    report = {
        "n_records": len(test),
        "total_weight": test.total_weight,
        "usecase": usecase_to_json(penalty, usecase),
        "omega": penalty.omega,
        "accuracy": accuracy(test),
        "ece": {"n_bins": args.ece_bins, "value": ece(test, args.ece_bins)},
        "discrimination": {
            "discrimination": disc.discrimination,
            "high_component": disc.high_component,
            "low_component": disc.low_component,
        },
        "discriminator": h_json,
        "thresholds": rows,
        "voc": _curve_json(curve, bands),
        "fixed_voc": _curve_json(fixed, bands),
    }
    if args.svg:
        _write_text(args.svg, render_svg([curve, fixed], ["omega-aware", f"fixed t={fmt(best['threshold'])}"], args.omega_max))
        report["svg"] = args.svg
    return report


def cmd_synth(args) -> dict:
    if args.dist:
        dist = distribution_from_json(_read_json(args.dist), args.dist)
    else:
        dist = preset(args.preset)
    seed = args.seed if args.seed is not None else _seed_default()
    data = realize(dist, args.mode, args.n, seed)
    write_predictions(data, args.out, with_weight=True)
    if args.dist_out:
        _write_text(args.dist_out, dumps(distribution_to_json(dist)))
    return {"out": args.out, "mode": args.mode, "n_records": len(data), "seed": seed if args.mode == SAMPLE else None}


def cmd_calibrate(args) -> dict:
    if args.action == "fit":
        m = isotonic_rescale(read_predictions(args.val))
        _write_text(args.out, format_rescale(m))
        return {"out": args.out, "breakpoints": len(m.breakpoints)}
    data = read_predictions(args.pred)
    m = parse_rescale(Path(args.rescale).read_text(encoding="utf-8"), args.rescale)
    rescaled = apply_rescale(data, m)
    write_predictions(rescaled, args.out)
    return {"out": args.out, "ece_before": ece(data), "ece_after": ece(rescaled)}


def cmd_discriminate(args) -> dict:
    if args.action == "train":
        h = train_bin_remap(read_predictions(args.val), args.n_bins, args.per_class)
        _write_text(args.out, dumps(discriminator_to_json(h)))
        return {"out": args.out, "kind": h.kind, "entries": len(h.table)}
    data = read_predictions(args.pred)
    h = discriminator_from_json(_read_json(args.discriminator), args.discriminator)
    write_predictions(apply_discriminator(data, h), args.out)
    return {"out": args.out}


# -- wiring -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vocbench", description="Value-based evaluation of classifiers with a reject option.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def band_flag(sp):
        sp.add_argument("--band", action="append", metavar="LO:HI",
                        help="AUC band; HI may be 'inf' or 'sup'. Repeatable. Default: 0:1 and 1:sup")

    sp = sub.add_parser("eval", help="value of a fixed threshold")
    sp.add_argument("--pred", required=True)
    sp.add_argument("--usecase", required=True)
    sp.add_argument("--threshold", type=float, default=0.0)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("optimize", help="penalty-aware threshold from validation predictions")
    sp.add_argument("--val", required=True)
    sp.add_argument("--usecase", required=True)
    sp.add_argument("--test", help="also report the value of the chosen threshold on these predictions")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("voc", help="VOC curves, omega_sup and AUC")
    sp.add_argument("--pred", required=True, action="append", help="repeat to overlay several curves")
    sp.add_argument("--mode", choices=("fixed", "omega-aware"), default="omega-aware")
    sp.add_argument("--threshold", type=float, default=0.0, help="threshold for --mode fixed")
    sp.add_argument("--omega-max", type=float, default=10.0)
    band_flag(sp)
    sp.add_argument("--out-csv")
    sp.add_argument("--out-svg")
    sp.set_defaults(func=cmd_voc)

    sp = sub.add_parser("report", help="all metrics in one JSON document")
    sp.add_argument("--pred", required=True, help="test predictions")
    sp.add_argument("--val", help="validation predictions for threshold fitting")
    sp.add_argument("--usecase", required=True)
    sp.add_argument("--omega", type=float, action="append", help="extra penalties to optimize for")
    band_flag(sp)
    sp.add_argument("--ece-bins", type=int, default=DEFAULT_N_BINS)
    sp.add_argument("--discriminator", help="discriminator JSON applied before every metric")
    sp.add_argument("--omega-max", type=float, default=10.0)
    sp.add_argument("--svg")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=build_report)

    sp = sub.add_parser("synth", help="calibrated synthetic predictions")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--dist", help="JSON list of {confidence, mass}")
    sp.add_argument("--mode", choices=(POPULATION, SAMPLE), default=POPULATION)
    sp.add_argument("--n", type=int, default=10000)
    sp.add_argument("--seed", type=int, help="default: $VOCBENCH_SEED or 0")
    sp.add_argument("--out", required=True)
    sp.add_argument("--dist-out")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("calibrate", help="fit or apply an isotonic rescale")
    csub = sp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    fit = csub.add_parser("fit")
    fit.add_argument("--val", required=True)
    fit.add_argument("--out", required=True)
    app = csub.add_parser("apply")
    app.add_argument("--pred", required=True)
    app.add_argument("--rescale", required=True)
    app.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("discriminate", help="train or apply a bin-remap discriminator")
    dsub = sp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    tr = dsub.add_parser("train")
    tr.add_argument("--val", required=True)
    tr.add_argument("--n-bins", type=int, default=10)
    tr.add_argument("--per-class", action="store_true")
    tr.add_argument("--out", required=True)
    app = dsub.add_parser("apply")
    app.add_argument("--pred", required=True)
    app.add_argument("--discriminator", required=True)
    app.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_discriminate)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
        _emit(result, getattr(args, "out", None) if args.command == "report" else None)
        return EXIT_OK
    except (ParseError, UsageError, OSError) as exc:
        print(f"vocbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, VocError) as exc:
        print(f"vocbench: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last resort
        print(f"vocbench: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
