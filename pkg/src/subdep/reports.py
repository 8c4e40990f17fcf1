"""CSV ingestion, subcopula files and the versioned JSON report document."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .subcopula import DependenceReport, GridDomain, GridPoint, StructureError, Subcopula

REPORT_VERSION = "1"


@dataclass(frozen=True)
class Dataset:
    column_names: list[str]
    columns: list[np.ndarray]
    na_token: str = "NA"

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[self.column_names.index(name)]
        except ValueError:
            raise KeyError(f"no column named {name!r}; have {self.column_names}") from None


def read_csv(path: str, na_token: str = "NA") -> Dataset:
    """Comma-separated file with a header row. ``na_token`` and empty fields are missing."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError(f"{path}: empty file")
    names = [h.strip() for h in rows[0]]
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: duplicate column names")
    cols: list[list[float]] = [[] for _ in names]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(names):
            raise ValueError(f"{path}:{lineno}: expected {len(names)} fields, got {len(row)}")
        for k, field_ in enumerate(row):
            tok = field_.strip()
            if tok == na_token or tok == "":
                cols[k].append(math.nan)
                continue
            try:
                cols[k].append(float(tok))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: cannot parse {tok!r} as a number") from None
    return Dataset(names, [np.array(c, dtype=float) for c in cols], na_token)


# --------------------------------------------------------------------------
# JSON with fixed float formatting


def _num(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if s in ("-0", "0"):
        return "0.0" if s == "0" else "-0.0"
    if "." not in s and "e" not in s and "inf" not in s:
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: insertion key order, floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating, Fraction)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@dataclass
class ReportDocument:
    command: str
    parameters: dict
    results: dict
    warnings: list[str] = field(default_factory=list)
    version: str = REPORT_VERSION

    def to_json(self) -> str:
        return dumps({
            "version": self.version,
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "warnings": list(self.warnings),
        }) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        raw = json.loads(text)
        return cls(raw["command"], raw["parameters"], raw["results"], list(raw["warnings"]), raw["version"])


def _exact_str(x) -> str | None:
    return f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else None


def _point(p: GridPoint) -> dict:
    return {"i": p.i, "j": p.j, "u": float(p.u), "v": float(p.v)}


def report_dict(rep: DependenceReport) -> dict:
    out: dict[str, Any] = {}
    for name in ("mu", "d_s", "d_m", "d_w"):
        val = getattr(rep, name)
        out[name] = None if val is None else float(val)
        exact = _exact_str(val)
        if exact is not None:
            out[name + "_exact"] = exact
    out["argmax_pos"] = _point(rep.argmax_pos)
    out["argmax_neg"] = _point(rep.argmax_neg)
    out["domain_sizes"] = list(rep.domain_sizes)
    out["degenerate"] = rep.degenerate
    if rep.n is not None:
        out["n"] = rep.n
        out["dropped"] = rep.dropped
    return out


# --------------------------------------------------------------------------
# subcopula files: three blocks (d1 levels, d2 levels, value matrix)


def subcopula_dict(s: Subcopula) -> dict:
    out = {
        "d1": s.d1.as_float().tolist(),
        "d2": s.d2.as_float().tolist(),
        "values": s.float_values().tolist(),
    }
    if s.exact_mode:
        out["exact"] = {
            "scale": s.scale,
            "d1": [int(v) for v in s.d1.levels],
            "d2": [int(v) for v in s.d2.levels],
            "values": [[int(v) for v in row] for row in s.values],
        }
    return out


def _rational_cells(cells) -> bool:
    return any(isinstance(c, str) for c in cells)


def subcopula_from_dict(raw: dict) -> Subcopula:
    """Parse the JSON form. An ``exact`` block (integer numerators over
    ``scale``) wins; otherwise ``"p/q"`` strings anywhere make the whole
    matrix exact and plain numbers give a floating subcopula."""
    try:
        if "exact" in raw:
            ex = raw["exact"]
            scale = int(ex["scale"])
            return Subcopula(GridDomain(ex["d1"], scale), GridDomain(ex["d2"], scale), ex["values"])
        d1, d2, values = raw["d1"], raw["d2"], raw["values"]
    except (KeyError, TypeError) as exc:
        raise StructureError(f"subcopula document missing field: {exc}") from None
    return _build(d1, d2, values)


def _build(d1, d2, values) -> Subcopula:
    if not isinstance(values, list) or any(not isinstance(r, list) for r in values):
        raise StructureError("values must be a list of rows")
    widths = {len(r) for r in values}
    if len(widths) > 1:
        raise StructureError("value matrix rows have different lengths")
    cells = list(d1) + list(d2) + [c for r in values for c in r]
    try:
        if _rational_cells(cells):
            return Subcopula.from_fractions(d1, d2, values)
        return Subcopula(GridDomain([float(v) for v in d1]), GridDomain([float(v) for v in d2]),
                         [[float(v) for v in r] for r in values])
    except (TypeError, ZeroDivisionError) as exc:
        raise StructureError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, StructureError):
            raise
        raise StructureError(str(exc)) from None


def _cell_str(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return _num(x)


def subcopula_to_csv(s: Subcopula) -> str:
    """Blocks separated by blank lines; exact values are written as ``p/q``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([_cell_str(f) for f in (s.d1.fractions() if s.exact_mode else s.d1.as_float())])
    buf.write("\n")
    w.writerow([_cell_str(f) for f in (s.d2.fractions() if s.exact_mode else s.d2.as_float())])
    buf.write("\n")
    for i in range(s.shape[0]):
        w.writerow([_cell_str(s.value(i, j)) for j in range(s.shape[1])])
    return buf.getvalue()


def subcopula_from_csv(text: str) -> Subcopula:
    blocks: list[list[list[str]]] = [[]]
    for row in csv.reader(io.StringIO(text)):
        if not row or all(not c.strip() for c in row):
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append([c.strip() for c in row])
    blocks = [b for b in blocks if b]
    if len(blocks) != 3 or len(blocks[0]) != 1 or len(blocks[1]) != 1:
        raise StructureError("expected three blocks: d1 levels, d2 levels, value matrix")
    cells = blocks[0][0] + blocks[1][0] + [c for r in blocks[2] for c in r]
    exact = any("/" in c for c in cells)
    conv = Fraction if exact else float
    try:
        d1 = [conv(c) for c in blocks[0][0]]
        d2 = [conv(c) for c in blocks[1][0]]
        vals = [[conv(c) for c in r] for r in blocks[2]]
    except (ValueError, ZeroDivisionError) as exc:
        raise StructureError(f"unparseable entry: {exc}") from None
    if exact:
        return _build([str(v) for v in d1], [str(v) for v in d2], [[str(v) for v in r] for r in vals])
    return _build(d1, d2, vals)


def read_subcopula(path: str) -> Subcopula:
    with open(path) as fh:
        text = fh.read()
    if path.lower().endswith(".json") or text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructureError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(raw, dict):
            raise StructureError(f"{path}: expected a JSON object")
        return subcopula_from_dict(raw)
    return subcopula_from_csv(text)


def rows_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell_str(v) if isinstance(v, (float, Fraction, np.floating)) else v for v in r])
    return buf.getvalue()
