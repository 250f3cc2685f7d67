"""Result tables and their CSV / JSON serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["ResultTable", "emit_table", "read_table", "format_value"]

VALUE_COLUMNS = ("scheme", "metric", "mean", "std_err", "trials", "analytic")


@dataclass
class ResultTable:
    """Rows of ``(sweep value, scheme, metric, mean, std_err, trials, analytic)``.

    ``std_err`` is the sample standard deviation of the per-trial values
    divided by ``sqrt(trials)``; ``analytic`` is NaN where no prediction applies.
    """

    sweep_name: str
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self) -> tuple[str, ...]:
        return (self.sweep_name,) + VALUE_COLUMNS

    def add(self, sweep_value, scheme, metric, per_trial, analytic=float("nan")):
        per_trial = np.asarray(per_trial, dtype=float)
        n = per_trial.size
        mean = float(np.mean(per_trial)) if n else float("nan")
        std_err = float(np.std(per_trial, ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
        self.rows.append((sweep_value, str(scheme), metric, mean, std_err, int(n), float(analytic)))

    def select(self, scheme=None, metric=None):
        """Rows filtered by scheme label and/or metric, in insertion order."""
        return [r for r in self.rows
                if (scheme is None or r[1] == scheme) and (metric is None or r[2] == metric)]

    def series(self, scheme, metric):
        """``(sweep values, means, std_errs, analytic)`` arrays for one scheme/metric."""
        rows = self.select(scheme, metric)
        cols = list(zip(*rows)) if rows else [()] * 7
        return (np.array(cols[0], dtype=float), np.array(cols[3], dtype=float),
                np.array(cols[4], dtype=float), np.array(cols[6], dtype=float))

    def as_dicts(self):
        return [dict(zip(self.columns, r)) for r in self.rows]


def format_value(v) -> str:
    """Floats in round-trip scientific notation, integers and strings verbatim."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17e")
    return str(v)


def _to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else v
    return v


def _to_json(table: ResultTable) -> str:
    doc = {
        "columns": list(table.columns),
        "rows": [[_json_value(v) for v in row] for row in table.rows],
        "metadata": table.metadata,
    }
    return json.dumps(doc, indent=1, default=_json_value) + "\n"


def emit_table(table: ResultTable, fmt: str = "csv", path=None) -> str:
    """Serialise ``table`` as ``csv`` or ``json``; writes to ``path`` unless it is None or ``-``.

    Returns the serialised text.
    """
    if fmt == "csv":
        text = _to_csv(table)
    elif fmt == "json":
        text = _to_json(table)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected csv or json")
    if path is not None and str(path) != "-":
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write result table to {path}: {exc.strerror}") from exc
    return text


def _parse_cell(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_table(path, fmt: str | None = None) -> ResultTable:
    """Inverse of :func:`emit_table` (metadata is only preserved for JSON)."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    text = path.read_text()
    if fmt == "json":
        doc = json.loads(text)
        rows = [tuple(float("nan") if v is None else v for v in r) for r in doc["rows"]]
        # JSON drops the float/int distinction for integral floats in the analytic column
        rows = [r[:3] + tuple(float(v) for v in r[3:5]) + (int(r[5]), float(r[6])) for r in rows]
        return ResultTable(doc["columns"][0], rows, doc.get("metadata", {}))
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = []
    for rec in reader:
        sweep = _parse_cell(rec[0])
        rows.append((sweep, rec[1], rec[2], float(rec[3]), float(rec[4]), int(rec[5]), float(rec[6])))
    return ResultTable(header[0], rows)
