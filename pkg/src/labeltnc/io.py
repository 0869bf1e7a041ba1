"""File formats: point matrices (CSV), label files, reports and curves.

Matrix CSV: one row per point, comma-separated decimals, no header unless
requested. Labels: one integer per non-empty line. Reports and curves are
JSON with a fixed key order and shortest round-trip floats, so equal inputs
give byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from labeltnc.core import InputError, NonFinite, ParseError, RaggedRows

SCHEMA_VERSION = "1"

METADATA_KEYS = ("tool", "tool_version", "inputs", "n", "k", "dim_original", "dim_embedding",
                 "seed", "mc_count", "k_list", "sigma_list", "thresholds", "threads_independent")
LTNC_KEYS = ("label_t", "label_c", "quadrant", "guideline", "unlikely", "k",
             "clm_matrix_x", "clm_matrix_z", "m_fg", "m_mg")
COMPETITOR_KEYS = ("trustworthiness", "continuity", "mrre_false", "mrre_missing", "kl", "kl_quality",
                   "baseline", "steadiness", "cohesiveness", "ca_trust", "ca_cont", "dtm")
RESERVED_SLOTS = ("steadiness", "cohesiveness", "ca_trust", "ca_cont", "dtm")


def _io_error(path, exc: OSError) -> InputError:
    return InputError(f"cannot read {path}: {exc.strerror or exc}")


def read_matrix_csv(path, header: bool = False) -> np.ndarray:
    """Read an N x dim matrix; blank lines are skipped, row order is kept."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise _io_error(path, exc) from exc
    data = []
    width = None
    for lineno, row in enumerate(rows, start=1):
        if header and lineno == 1:
            continue
        if not row or all(not cell.strip() for cell in row):
            continue
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise RaggedRows(f"{path}: line {lineno} has {len(row)} columns, expected {width}", lineno)
        values = []
        for col, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"{path}: line {lineno}, column {col}: not a number: {cell!r}", lineno, col) from None
            if not math.isfinite(v):
                raise NonFinite(f"{path}: line {lineno}, column {col}: non-finite value {cell.strip()!r}")
            values.append(v)
        data.append(values)
    if not data:
        raise ParseError(f"{path}: no data rows")
    return np.array(data, dtype=np.float64)


def read_labels(path) -> np.ndarray:
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise _io_error(path, exc) from exc
    out = []
    for lineno, line in enumerate(lines, start=1):
        tok = line.strip()
        if not tok:
            continue
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: not an integer label: {tok!r}", lineno, 1) from None
    return np.array(out, dtype=np.int64)


def write_matrix_csv(path, matrix: np.ndarray) -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_labels(path, labels) -> None:
    with open(path, "w") as fh:
        fh.write("".join(f"{int(v)}\n" for v in labels))


def plain(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _ordered(d: dict, keys) -> dict:
    out = {k: d[k] for k in keys if k in d}
    for k in sorted(set(d) - set(keys)):
        out[k] = d[k]
    return out


@dataclass
class ReportDocument:
    metadata: dict[str, Any]
    ltnc: dict[str, dict[str, Any]]
    competitors: dict[str, Any] = field(default_factory=dict)
    timing: dict[str, float] | None = None
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        competitors = dict(self.competitors)
        for slot in RESERVED_SLOTS:
            competitors.setdefault(slot, None)
        return plain({
            "schema_version": self.schema_version,
            "metadata": _ordered(self.metadata, METADATA_KEYS),
            "ltnc": {cvm: _ordered(block, LTNC_KEYS) for cvm, block in self.ltnc.items()},
            "competitors": _ordered(competitors, COMPETITOR_KEYS),
            "timing": None if self.timing is None else dict(self.timing),
        })

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ReportDocument":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ParseError(f"unsupported report schema {d.get('schema_version')!r}")
        return cls(
            metadata=d["metadata"],
            ltnc=d["ltnc"],
            competitors=d.get("competitors", {}),
            timing=d.get("timing"),
            schema_version=d["schema_version"],
        )

    def __eq__(self, other):
        return isinstance(other, ReportDocument) and self.to_dict() == other.to_dict()


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, allow_nan=False, ensure_ascii=True) + "\n"


def write_report(report: ReportDocument, path) -> None:
    Path(path).write_text(dumps(report.to_dict()))


def read_report(path) -> ReportDocument:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _io_error(path, exc) from exc
    return ReportDocument.from_dict(json.loads(text))


# -- curves -----------------------------------------------------------------


def curve_to_dict(curve) -> dict[str, Any]:
    return plain({
        "schema_version": SCHEMA_VERSION,
        "experiment": curve.experiment_id,
        "parameter_name": curve.parameter_name,
        "columns": ["step_index", "parameter", *curve.columns],
        "rows": [list(r) for r in curve.rows],
        "metadata": dict(curve.metadata),
    })


def write_curve(curve, path) -> None:
    """Write ``<path>.csv`` and ``<path>.json`` (``path`` without suffix is fine)."""
    path = Path(path)
    stem = path.with_suffix("") if path.suffix in (".csv", ".json") else path
    header = ",".join(["step_index", "parameter", *curve.columns])
    lines = [header]
    for row in plain(curve.rows):
        step, *vals = row
        lines.append(",".join([str(int(step))] + [repr(float(v)) for v in vals]))
    stem.with_suffix(".csv").write_text("\n".join(lines) + "\n")
    stem.with_suffix(".json").write_text(dumps(curve_to_dict(curve)))


def read_curve(path):
    """Load a curve written by :func:`write_curve` from its JSON file."""
    from labeltnc.synthbench import SensitivityCurve

    path = Path(path)
    d = json.loads(path.with_suffix(".json").read_text())
    rows = [(int(r[0]), *[float(v) for v in r[1:]]) for r in d["rows"]]
    return SensitivityCurve(d["experiment"], d["parameter_name"], d["columns"][2:], rows, d["metadata"])
