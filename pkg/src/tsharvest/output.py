"""Result tables and their on-disk layout.

    <output_dir>/<command>/<label>/data.csv    main table
                                  /<extra>.csv  secondary tables
                                  /meta.json    config echo, provenance, scalar results
                                  /*.svg        plots

CSV files start with ``# key: value`` provenance lines, then an RFC-4180
header and rows; floats use 12 significant digits.
"""

import csv
import io
import json
import math
import os
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


@dataclass
class ResultTable:
    columns: list
    rows: list
    units: dict = field(default_factory=dict)
    # scalar results echoed into meta.json
    meta: dict = field(default_factory=dict)
    # named secondary tables written next to data.csv
    extras: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def column(self, name):
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def as_array(self, name):
        return np.array([np.nan if v is None or v == "" else v for v in self.column(name)], dtype=float)


def format_cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(value)


def to_csv(table, provenance=None):
    buf = io.StringIO()
    for key, value in (provenance or table.provenance).items():
        if value is not None:
            buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if hasattr(value, "value"):
        return value.value
    return value


def to_json(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def build_id():
    """Package version plus the git commit of the source tree when available."""
    here = Path(__file__).resolve().parent
    try:
        sha = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"], cwd=here, capture_output=True,
            text=True, timeout=5, check=True,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        sha = ""
    return f"tsharvest-{__version__}" + (f"+g{sha}" if sha else "")


def write_result(table, out_dir, formats, meta, figures=None):
    """Write CSV/JSON/SVG artefacts; returns the list of written paths."""
    out_dir = Path(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "csv" in formats:
        path = out_dir / "data.csv"
        path.write_text(to_csv(table), encoding="utf-8", newline="")
        written.append(path)
        for name, extra in table.extras.items():
            path = out_dir / f"{name}.csv"
            path.write_text(to_csv(extra, table.provenance), encoding="utf-8", newline="")
            written.append(path)
    if "svg" in formats:
        for name, text in (figures or {}).items():
            path = out_dir / f"{name}.svg"
            path.write_text(text, encoding="utf-8")
            written.append(path)
    if "json" in formats:
        path = out_dir / "meta.json"
        meta = dict(meta)
        meta["files"] = sorted([p.name for p in written] + ["meta.json"])
        path.write_text(to_json(meta), encoding="utf-8")
        written.append(path)
    return written
