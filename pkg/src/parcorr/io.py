"""CSV and manifest ingestion, report serialization, plot-data emission.

A manifest is a JSON file::

    {
      "version": 1,
      "experiments": [
        {"label": "s1", "x_path": "s1_x.csv", "y_path": "s1_y.csv", "z_path": "s1_z.csv"},
        ...
      ]
    }

Relative paths are resolved against the manifest's directory. ``z_path`` may
be omitted, giving that experiment a confounder with zero columns.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .engine import TestReport, confounder
from .errors import ParseError, ValidationError
from .model import Dataset, Experiment, validate_dataset
from .projection import DEFAULT_TOL, joint_basis, orthonormal_basis, residualize

MANIFEST_VERSION = 1


def _parse_row(row: list[str]) -> list[float] | None:
    try:
        return [float(c) for c in row]
    except ValueError:
        return None


def load_csv_series(path) -> np.ndarray:
    """Read a numeric CSV into a ``T x k`` matrix (rows are timepoints).

    A first row that does not parse as numbers is taken as a header.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except UnicodeDecodeError as err:
        raise ParseError(f"{path}: not valid UTF-8") from err
    rows = [(k + 1, r) for k, r in enumerate(csv.reader(text.splitlines())) if r]
    if not rows:
        raise ParseError(f"{path}: empty file")
    if _parse_row(rows[0][1]) is None:
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows after header")

    width = len(rows[0][1])
    values = []
    for lineno, row in rows:
        if len(row) != width:
            raise ParseError(f"{path}: row {lineno} has {len(row)} columns, expected {width}")
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric value {cell!r} at row {lineno}, column {col}"
                ) from None
            if not math.isfinite(v):
                raise ParseError(f"{path}: non-finite value {cell!r} at row {lineno}, column {col}")
            parsed.append(v)
        values.append(parsed)
    return np.array(values, dtype=float)


def write_csv_series(path, values, header: list[str] | None = None):
    """Write a matrix as CSV; floats use shortest round-trip repr."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in arr:
            w.writerow([repr(float(v)) for v in row])


def load_manifest(path) -> Dataset:
    path = Path(path)
    try:
        spec = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: invalid JSON ({err})") from err
    if not isinstance(spec, dict) or spec.get("version") != MANIFEST_VERSION:
        raise ParseError(f"{path}: manifest version must be {MANIFEST_VERSION}")
    entries = spec.get("experiments")
    if not isinstance(entries, list):
        raise ParseError(f"{path}: 'experiments' must be a list")

    base = path.parent
    labels = [e.get("label") for e in entries if isinstance(e, dict)]
    if len(labels) != len(entries) or any(not isinstance(lab, str) or not lab for lab in labels):
        raise ParseError(f"{path}: every experiment needs a non-empty string 'label'")
    dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
    if dupes:
        raise ParseError(f"{path}: duplicate labels {dupes}")

    experiments = []
    for entry in entries:
        arrays = {}
        for key in ("x_path", "y_path", "z_path"):
            rel = entry.get(key)
            if rel is None:
                if key == "z_path":
                    continue
                raise ParseError(f"{path}: experiment {entry['label']!r} lacks {key!r}")
            file = base / rel
            if not file.is_file():
                raise ParseError(f"{path}: experiment {entry['label']!r}: {file} does not exist")
            arrays[key] = load_csv_series(file)
        experiments.append(
            Experiment(arrays["x_path"], arrays["y_path"], arrays.get("z_path"), entry["label"])
        )
    d = Dataset(tuple(experiments))
    validate_dataset(d).raise_if_invalid()
    return d


def dump_dataset(d: Dataset, out_dir) -> Path:
    """Write every series as CSV plus a ``manifest.json``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for e in d:
        entry = {"label": e.label}
        for name, arr in (("x", e.x), ("y", e.y), ("z", e.z)):
            if name == "z" and arr.shape[1] == 0:
                continue
            fname = f"{e.label}_{name}.csv"
            write_csv_series(out / fname, arr)
            entry[f"{name}_path"] = fname
        entries.append(entry)
    manifest = out / "manifest.json"
    manifest.write_text(
        json.dumps({"version": MANIFEST_VERSION, "experiments": entries}, indent=2) + "\n",
        encoding="utf-8",
    )
    return manifest


def _num(v):
    """JSON-safe float: non-finite values become null."""
    v = float(v)
    return v if math.isfinite(v) else None


def report_to_dict(report: TestReport) -> dict:
    from . import __version__

    return {
        "g": [_num(v) for v in report.g],
        "t_stat": _num(report.t_stat),
        "df": int(report.df),
        "p_value": _num(report.p_value),
        "skewness": _num(report.skewness),
        "qq_points": [[_num(a), _num(b)] for a, b in report.qq_points],
        "mode": report.mode,
        "rho": dict(report.rho_config),
        "n": int(report.n),
        "t_len": int(report.t_len),
        "warnings": list(report.warnings),
        "alternative": report.alternative,
        "alpha": _num(report.alpha),
        "reject": bool(report.reject),
        "z_intercept": bool(report.z_intercept),
        "tool_version": __version__,
    }


def write_json(obj: dict, path):
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n", encoding="utf-8")


def write_report(report: TestReport, path, format: str = "json"):
    if format != "json":
        raise ValueError(f"unsupported report format {format!r}")
    try:
        write_json(report_to_dict(report), path)
    except OSError as err:
        raise OSError(f"cannot write report to {path}: {err}") from err


def emit_plot_data(d: Dataset, report: TestReport, out_dir, tol: float = DEFAULT_TOL):
    """Write per-experiment series and the residual of Y_1 for pair (1, 2).

    Files: ``<label>_x.csv``, ``<label>_y.csv``, ``<label>_z.csv`` per
    experiment, ``residual_1_2.csv`` (``Y_1`` with the confounders of
    experiments 1 and 2 projected out, or only those of experiment 1 in
    invalid_single mode), ``g_values.csv`` and ``qq.csv``.
    """
    if len(d) < 2:
        raise ValidationError("plot data needs at least two experiments")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t = np.arange(d.t_len, dtype=float)

    def with_time(arr, prefix):
        header = ["t"] + [f"{prefix}{k}" for k in range(arr.shape[1])]
        return np.column_stack([t, arr]), header

    for e in d:
        for name, arr in (("x", e.x), ("y", e.y), ("z", e.z)):
            data, header = with_time(arr, name)
            write_csv_series(out / f"{e.label}_{name}.csv", data, header)

    e1, e2 = d[0], d[1]
    c1 = confounder(e1.z, report.z_intercept)
    c2 = confounder(e2.z, report.z_intercept)
    if report.mode == "invalid_single":
        basis = orthonormal_basis(c1, tol)
    else:
        basis = joint_basis(c1, c2, tol)
    data, header = with_time(residualize(e1.y, basis), "resid_y")
    write_csv_series(out / "residual_1_2.csv", data, header)

    with open(out / "g_values.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "g"])
        for e, g in zip(d, report.g):
            w.writerow([e.label, repr(float(g))])
    write_csv_series(out / "qq.csv", report.qq_points, ["theoretical", "empirical"])
