"""Dataset, query, and report file formats (CSV + JSON sidecar + JSON Lines)."""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path
from typing import Optional

import numpy as np

from .model import MeshIndex, TrainingSet, ValidationError, validate_training_set


class ParseError(ValidationError):
    """Malformed input file; message carries the offending line number."""


_X_COL = re.compile(r"^x(\d+)$")
_Y_COL = re.compile(r"^y(\d*)$")


def _sidecar_path(path) -> Path:
    return Path(path).with_suffix(".mesh.json")


def _parse_header(header: list, path) -> tuple[int, int]:
    """Return (n, layer_count) for a header of x1..xn then y or y1..ym."""
    cols = [c.strip() for c in header]
    n = 0
    while n < len(cols) and _X_COL.match(cols[n]):
        n += 1
    layers = len(cols) - n
    if n == 0 or layers == 0:
        raise ParseError(
            f"{path}, line 1: header must be x1..xn followed by y or y1..ym, "
            f"got {cols!r}"
        )
    expected_x = [f"x{i + 1}" for i in range(n)]
    expected_y = ["y"] if layers == 1 else [f"y{i + 1}" for i in range(layers)]
    if cols != expected_x + expected_y:
        raise ParseError(f"{path}, line 1: unexpected header {cols!r}")
    return n, layers


def _read_rows(path, width: int) -> np.ndarray:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)  # header, already parsed
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != width:
                raise ParseError(
                    f"{path}, line {lineno}: expected {width} fields, got {len(row)}"
                )
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ParseError(f"{path}, line {lineno}: {exc}") from exc
    return np.asarray(rows, dtype=float).reshape(-1, width)


def load_dataset(path) -> tuple[TrainingSet, Optional[MeshIndex]]:
    """Load a CSV dataset, plus its mesh sidecar when one sits next to it."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise ParseError(f"{path}, line 1: file is empty")
    n, layers = _parse_header(header, path)
    data = _read_rows(path, n + layers)
    training = validate_training_set((data[:, :n], data[:, n:]), n=n, layer_count=layers)

    mesh = None
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        mesh = load_mesh_sidecar(sidecar)
        if mesh.n != n:
            raise ParseError(
                f"{sidecar}: mesh has {mesh.n} axes but dataset has {n} predictors"
            )
    return training, mesh


def load_mesh_sidecar(path) -> MeshIndex:
    with open(path, encoding="utf-8") as fh:
        try:
            meta = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    try:
        axes = tuple(np.asarray(a, dtype=float) for a in meta["axes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: missing or malformed 'axes'") from exc
    index_map = None
    if meta.get("index_map") is not None:
        index_map = {
            tuple(int(t) for t in key.split(",")): int(v)
            for key, v in meta["index_map"].items()
        }
    return MeshIndex(
        axes=axes,
        jitter_fraction=float(meta.get("jitter_fraction", 0.0)),
        index_map=index_map,
    )


def save_dataset(path, training: TrainingSet, mesh: Optional[MeshIndex] = None) -> None:
    """Write a dataset (and mesh sidecar) that ``load_dataset`` reads back equal."""
    path = Path(path)
    header = [f"x{i + 1}" for i in range(training.n)]
    header += ["y"] if training.layer_count == 1 else [
        f"y{i + 1}" for i in range(training.layer_count)
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(training.npoints):
            writer.writerow(
                [repr(float(v)) for v in training.x[i]]
                + [repr(float(v)) for v in training.y[i]]
            )
    if mesh is not None:
        meta = {
            "axes": [[float(v) for v in a] for a in mesh.axes],
            "jitter_fraction": mesh.jitter_fraction,
            "layout": "row-major",
        }
        if mesh.index_map is not None:
            meta["index_map"] = {
                ",".join(str(t) for t in k): int(v)
                for k, v in sorted(mesh.index_map.items())
            }
        with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2)
            fh.write("\n")


def load_queries(path) -> np.ndarray:
    """Load a query CSV with header x1..xn."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise ParseError(f"{path}, line 1: file is empty")
    cols = [c.strip() for c in header]
    if not all(_X_COL.match(c) for c in cols) or cols != [
        f"x{i + 1}" for i in range(len(cols))
    ]:
        raise ParseError(f"{path}, line 1: query header must be x1..xn, got {cols!r}")
    return _read_rows(path, len(cols))


def write_imputed(path, rows: list) -> None:
    """Write imputation output: coordinates, per-layer estimates, status, flags.

    Each row is a dict with keys "coords" (sequence), "y_hat" (sequence or
    None), "method", "status", "flags" (string).
    """
    if not rows:
        raise ValidationError("no output rows to write")
    n = len(rows[0]["coords"])
    layers = max(len(r["y_hat"]) for r in rows if r["y_hat"] is not None)
    header = [f"x{i + 1}" for i in range(n)]
    header += ["y_hat"] if layers == 1 else [f"y_hat{i + 1}" for i in range(layers)]
    header += ["method", "status", "flags"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in rows:
            y = (
                [repr(float(v)) for v in r["y_hat"]]
                if r["y_hat"] is not None
                else [""] * layers
            )
            writer.writerow(
                [repr(float(v)) for v in r["coords"]]
                + y
                + [r["method"], r["status"], r.get("flags", "")]
            )


def write_report(path, report: dict) -> None:
    """Append-style JSON Lines report: one line per scenario row.

    Each line carries the scenario row plus the run configuration echo, with
    sorted keys so identical runs produce byte-identical files.
    """
    echo = {k: report[k] for k in ("table", "scale", "seed", "workers")}
    with open(path, "w", encoding="utf-8") as fh:
        for row in report["rows"]:
            record = dict(row)
            record["config"] = echo
            if report.get("notes"):
                record["notes"] = report["notes"]
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def write_plot_csv(path, report: dict) -> None:
    """Plot-ready CSV: log10 of dataset size (or combination count) vs. error."""
    rows = report["rows"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if report["table"] == "averaging":
            writer.writerow(["log10_combinations", "log10_avg_abs_err"])
            for row in rows:
                writer.writerow(
                    [
                        repr(float(np.log10(row["combinations"]))),
                        repr(float(np.log10(row["avg_abs_err"]))),
                    ]
                )
            return
        writer.writerow(["log10_points", "rel_err"])
        for row in rows:
            size = row.get("points", row.get("queries", 0))
            err = row.get("rel_err", row.get("gradient_rel_err", row.get("r1")))
            writer.writerow([repr(float(np.log10(size))), repr(float(err))])
