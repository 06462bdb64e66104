"""Deterministic JSON and CSV emission.

Rationals are written as ``"num/den"`` strings, reals are rounded to 12
significant digits, and JSON keys are sorted, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .equidist import EquidistReport
from .errors import ReportIOError
from .sums import SumReport
from .tuples import Tuple
from .variational import MkCertificate, SimplexPolynomial
from .weights import EtaTable, LambdaTable


def fmt_real(x: float) -> str:
    return f"{x:.12g}"


def fmt_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(int(x)) for x in k)
    return str(k)


def to_jsonable(obj):
    """Plain JSON structure with the fixed number formatting."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return fmt_fraction(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(fmt_real(x))
    if isinstance(obj, MkCertificate):
        return obj.to_dict()
    if isinstance(obj, Tuple):
        return list(obj.h)
    if isinstance(obj, SimplexPolynomial):
        return {"k": obj.k, "terms": {_key(e): fmt_fraction(Fraction(c)) for e, c in sorted(obj.terms.items())}}
    if isinstance(obj, (LambdaTable, EtaTable)):
        return {
            "D": obj.D,
            "k": obj.k,
            "Z": obj.Z,
            "entries": {_key(key): fmt_fraction(v) for key, v in sorted(obj.entries.items())},
        }
    if is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
        for extra in ("normalized", "excess_ratio", "defect", "measured_constant", "primes"):
            if hasattr(type(obj), extra) and isinstance(getattr(type(obj), extra), property):
                out[extra] = to_jsonable(getattr(obj, extra))
        return out
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_json(report, config: dict | None = None) -> str:
    doc = {"report": to_jsonable(report)}
    if config is not None:
        doc["config"] = to_jsonable(config)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv_cell(v) -> str:
    v = to_jsonable(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt_real(v)
    return str(v)


def csv_table(report) -> tuple[list[str], list[list]]:
    """Header and rows of the fixed CSV schema for each report type."""
    if isinstance(report, EquidistReport):
        head = ["q", "witness_a", "max_error", "tau_weight"]
        rows = [[r.q, r.witness_a, r.max_error, r.tau_weight] for r in report.per_q]
        if report.meta.get("variant") == "smooth_roots":
            head += ["root_count", "root_error_sum"]
            rows = [row + [r.root_count, r.root_error_sum] for row, r in zip(rows, report.per_q)]
        return head, rows
    if isinstance(report, LambdaTable):
        return ["key", "numerator", "denominator"], [list(r) for r in report.to_csv_rows()]
    if isinstance(report, SumReport):
        return ["start", "stop", "T1", "T2"], [list(p) for p in report.partials]
    if isinstance(report, MkCertificate):
        rows = [[a, b, c.numerator, c.denominator] for (a, b), c in zip(report.basis, report.coefficients)]
        return ["a", "b", "numerator", "denominator"], rows
    if isinstance(report, dict) and "checks" in report:
        rows = [[c["name"], c["passed"], c.get("detail", "")] for c in report["checks"]]
        return ["check", "passed", "detail"], rows
    flat = to_jsonable(report)
    if not isinstance(flat, dict):
        raise TypeError(f"no CSV schema for {type(report).__name__}")
    return ["field", "value"], [[k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v] for k, v in sorted(flat.items())]


def render_csv(report) -> str:
    head, rows = csv_table(report)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(head)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def emit_report(report, fmt: str, path, config: dict | None = None) -> Path:
    """Write ``report`` as ``json`` or ``csv`` to ``path``.

    CSV files keep a fixed header, so the config echo goes to a sidecar
    ``<path>.config.json`` next to them.
    """
    if fmt not in ("json", "csv"):
        raise ValueError(f"format must be json or csv, got {fmt!r}")
    path = Path(path)
    text = render_json(report, config) if fmt == "json" else render_csv(report)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        if fmt == "csv" and config is not None:
            side = path.with_name(path.name + ".config.json")
            side.write_text(json.dumps(to_jsonable(config), sort_keys=True, indent=2) + "\n")
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {path}: {exc}") from exc
    return path
