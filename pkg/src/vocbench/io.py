"""Readers and writers for the on-disk formats.

Floats are written with ``repr``, the shortest string that reads back to the
same double, so every write/read round trip is exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Union

from .calibration import MonotoneRescale
from .core import Penalty, PredictionRecord, ScoredDataset, UseCase, VocError, to_penalty
from .discriminator import Discriminator, KINDS
from .synth import ConfidenceDistribution
from .voc import ValueLine, VocCurve

PathLike = Union[str, Path]

PREDICTION_COLUMNS = ("confidence", "predicted", "label")


class ParseError(VocError):
    """Malformed input file (bad syntax, missing columns, non-numeric cells)."""


class DataError(VocError):
    """Well-formed file whose values break a data invariant."""


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def json_number(x):
    """JSON-safe float: infinities become the string "inf"."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _write_text(path: PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- predictions ------------------------------------------------------------

def parse_predictions(text: str, source: str = "<input>") -> ScoredDataset:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{source}: empty file") from None
    header = [h.strip() for h in header]
    if tuple(header[:3]) != PREDICTION_COLUMNS or len(header) > 4 or (len(header) == 4 and header[3] != "weight"):
        raise ParseError(f"{source}: line 1: header must be confidence,predicted,label[,weight], got {','.join(header)}")
    has_weight = len(header) == 4
    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"{source}: line {line}: expected {len(header)} fields, got {len(row)}")
        try:
            conf = float(row[0])
            pred = int(row[1])
            label = int(row[2])
            weight = float(row[3]) if has_weight else 1.0
        except ValueError as exc:
            raise ParseError(f"{source}: line {line}: {exc}") from None
        try:
            records.append(PredictionRecord(conf, pred, label, weight))
        except VocError as exc:
            raise DataError(f"{source}: line {line}: {exc}") from None
    if not records:
        raise DataError(f"{source}: empty dataset")
    try:
        return ScoredDataset(records)
    except VocError as exc:
        raise DataError(f"{source}: {exc}") from None


def read_predictions(path: PathLike) -> ScoredDataset:
    return parse_predictions(Path(path).read_text(encoding="utf-8"), str(path))


def format_predictions(data: ScoredDataset, with_weight: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PREDICTION_COLUMNS + (("weight",) if with_weight else ()))
    for r in data.records:
        row = [fmt(r.confidence), r.predicted_class, r.true_label]
        if with_weight:
            row.append(fmt(r.weight))
        w.writerow(row)
    return buf.getvalue()


def write_predictions(data: ScoredDataset, path: PathLike, with_weight: bool = True) -> None:
    _write_text(path, format_predictions(data, with_weight))


# -- use cases --------------------------------------------------------------

def parse_usecase(obj, source: str = "<usecase>") -> tuple[Penalty, UseCase | None]:
    """Penalty (and the value triple when one was given) from a use-case JSON object."""
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: expected a JSON object")
    triple_keys = {"v_correct", "v_abstain", "v_wrong"}
    keys = set(obj)
    try:
        if keys == {"omega"}:
            return Penalty(_num(obj["omega"], source, "omega")), None
        if keys == triple_keys:
            uc = UseCase(*(_num(obj[k], source, k) for k in ("v_correct", "v_abstain", "v_wrong")))
            return to_penalty(uc), uc
    except (ParseError, DataError):
        raise
    except VocError as exc:
        raise DataError(f"{source}: {exc}") from None
    raise ParseError(f"{source}: expected exactly {{omega}} or {{v_correct, v_abstain, v_wrong}}, got {sorted(keys)}")


def _num(v, source, name) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{source}: {name} must be a number")
    return float(v)


def read_usecase(path: PathLike):
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return parse_usecase(obj, str(path))


def usecase_to_json(penalty: Penalty, usecase: UseCase | None = None) -> dict:
    if usecase is not None:
        return {"v_correct": usecase.v_correct, "v_abstain": usecase.v_abstain, "v_wrong": usecase.v_wrong}
    return {"omega": penalty.omega}


# -- curves -----------------------------------------------------------------

CURVE_COLUMNS = ("omega_start", "intercept_a", "slope_b", "threshold")


def format_curve(curve: VocCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for row in curve.rows():
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def parse_curve(text: str, mode: str, source: str = "<curve>") -> VocCurve:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CURVE_COLUMNS:
        raise ParseError(f"{source}: line 1: header must be {','.join(CURVE_COLUMNS)}")
    pieces = []
    for row in reader:
        if not row:
            continue
        try:
            start, a, b = (float(x) for x in row[:3])
            t = float(row[3]) if row[3] else None
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{source}: line {reader.line_num}: {exc}") from None
        pieces.append((Fraction(start), ValueLine(a, b, t)))
    return VocCurve(tuple(pieces), mode)


# -- rescales ---------------------------------------------------------------

def format_rescale(m: MonotoneRescale) -> str:
    lines = ["input,output"]
    lines += [f"{fmt(x)},{fmt(y)}" for x, y in m.breakpoints]
    return "\n".join(lines) + "\n"


def parse_rescale(text: str, source: str = "<rescale>") -> MonotoneRescale:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["input", "output"]:
        raise ParseError(f"{source}: line 1: header must be input,output")
    bps = []
    for row in reader:
        if not row:
            continue
        try:
            bps.append((float(row[0]), float(row[1])))
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{source}: line {reader.line_num}: {exc}") from None
    try:
        return MonotoneRescale(tuple(bps), "step")
    except VocError as exc:
        raise DataError(f"{source}: {exc}") from None


# -- discriminators ---------------------------------------------------------

def discriminator_to_json(h: Discriminator) -> dict:
    table = []
    for key, v in h.table.items():
        if isinstance(key, tuple):
            table.append({"bin": key[0], "class": key[1], "confidence": v})
        else:
            table.append({"bin": key, "confidence": v})
    return {"kind": h.kind, "n_bins": h.n_bins, "per_class": h.per_class, "table": table}


def discriminator_from_json(obj, source: str = "<discriminator>") -> Discriminator:
    try:
        kind = obj["kind"]
        n_bins = int(obj["n_bins"])
        per_class = bool(obj.get("per_class", kind == "class_bin_remap"))
        entries = obj.get("table", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{source}: {exc!r}") from None
    if kind not in KINDS:
        raise ParseError(f"{source}: unknown kind {kind!r}")
    if per_class != (kind == "class_bin_remap"):
        raise ParseError(f"{source}: per_class={per_class} contradicts kind {kind!r}")
    table = {}
    try:
        for e in entries:
            key = (int(e["bin"]), int(e["class"])) if per_class else int(e["bin"])
            table[key] = float(e["confidence"])
        return Discriminator(kind, n_bins, table)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, VocError):
            raise DataError(f"{source}: {exc}") from None
        raise ParseError(f"{source}: bad table entry: {exc!r}") from None


# -- distributions ----------------------------------------------------------

def distribution_to_json(dist: ConfidenceDistribution) -> list:
    return [{"confidence": c, "mass": m} for c, m in dist.atoms]


def distribution_from_json(obj, source: str = "<distribution>") -> ConfidenceDistribution:
    try:
        pairs = [(float(a["confidence"]), float(a["mass"])) for a in obj]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{source}: {exc!r}") from None
    try:
        return ConfidenceDistribution(tuple(pairs))
    except VocError as exc:
        raise DataError(f"{source}: {exc}") from None
