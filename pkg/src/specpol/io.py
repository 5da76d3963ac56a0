"""Deterministic file I/O: residual CSV, report JSON, trajectory ingestion.

All writers emit byte-identical output for identical inputs (shortest
round-trip float formatting, sorted JSON keys) and go through a temp-file
rename so partially written artifacts never appear under the final name.
"""

from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .dictionaries import SnapshotSet, snapshots_from_trajectory
from .edmd import ResidualField
from .errors import ParseError, TooFewSamples

__all__ = [
    "atomic_write_text", "write_residual_csv", "write_json", "write_labels_csv",
    "read_trajectory_csv", "ingest_trajectory", "save_gram_triple", "load_gram_triple",
]


def _fmt(x: float) -> str:
    return repr(float(x))


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_residual_csv(path, field: ResidualField) -> Path:
    buf = _io.StringIO()
    buf.write("re_lambda,im_lambda,residual\n")
    for z, v in zip(field.grid, field.values):
        buf.write(f"{_fmt(z.real)},{_fmt(z.imag)},{_fmt(v)}\n")
    return atomic_write_text(path, buf.getvalue())


def write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def write_labels_csv(path, labels, truth=None) -> Path:
    buf = _io.StringIO()
    buf.write("index,label\n" if truth is None else "index,label,truth\n")
    for i, lab in enumerate(labels):
        if truth is None:
            buf.write(f"{i},{int(lab)}\n")
        else:
            buf.write(f"{i},{int(lab)},{int(truth[i])}\n")
    return atomic_write_text(path, buf.getvalue())


def _looks_numeric(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def read_trajectory_csv(path) -> np.ndarray:
    """Read one state per row; a single non-numeric header row is allowed."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not tok.strip() for tok in row):
                continue
            if lineno == 1 and not all(_looks_numeric(tok) for tok in row):
                continue  # header
            vals = []
            for col, tok in enumerate(row, start=1):
                try:
                    vals.append(float(tok))
                except ValueError:
                    raise ParseError(f"non-numeric value {tok!r}", row=lineno, column=col)
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(f"expected {width} columns, found {len(vals)}", row=lineno)
            rows.append(vals)
    if not rows:
        raise TooFewSamples(f"no data rows in {path}")
    return np.asarray(rows, dtype=float)


def ingest_trajectory(path, stride: int = 1) -> SnapshotSet:
    """CSV trajectory to snapshot pairs: subsample by ``stride``, then pair."""
    return snapshots_from_trajectory(read_trajectory_csv(path), stride=stride)


def save_gram_triple(path, gt) -> Path:
    """Persist a Gram triple (with factors) as an .npz archive."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "G": gt.G, "A": gt.A, "J": gt.J,
        "space_kind": gt.space.kind.value, "s": gt.space.s,
        "radius_r": gt.space.radius_r, "n_samples": gt.n_samples,
        "coeff_band": -1 if gt.coeff_band is None else gt.coeff_band,
    }
    if gt.has_factors():
        payload["wx"] = gt.wx
        payload["wy"] = gt.wy
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        np.savez(fh, **payload)
    os.replace(tmp, path)
    return path


def load_gram_triple(path):
    from .spaces import GramTriple, InnerProductSpec, SpaceKind

    with np.load(path) as data:
        space = InnerProductSpec(SpaceKind(str(data["space_kind"])),
                                 s=float(data["s"]), radius_r=float(data["radius_r"]))
        band = int(data["coeff_band"])
        return GramTriple(
            G=data["G"], A=data["A"], J=data["J"], space=space,
            n_samples=int(data["n_samples"]),
            wx=data["wx"] if "wx" in data else None,
            wy=data["wy"] if "wy" in data else None,
            coeff_band=None if band < 0 else band,
        )
