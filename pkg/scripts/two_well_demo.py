#!/usr/bin/env python3
"""Synthetic metastable demo: generate a planar two-well trajectory, push it
through the kernel pipeline, and report the slow eigenvalue, its residual,
and the k-means well recovery."""

import sys
import tempfile
from pathlib import Path

import numpy as np

from specpol.cli import main as specpol_main


def two_well(n_steps=10_000, p_flip=0.0075, noise=0.2, seed=0):
    rng = np.random.default_rng(seed)
    hop = np.where(rng.random(n_steps - 1) < p_flip, -1.0, 1.0)
    wells = np.cumprod(np.concatenate([[1.0], hop]))
    pts = np.column_stack([wells, np.zeros(n_steps)])
    return pts + noise * rng.standard_normal((n_steps, 2))


def run(out_dir: str) -> int:
    traj = two_well()
    with tempfile.TemporaryDirectory() as tmp:
        csv_path = Path(tmp) / "two_well.csv"
        with open(csv_path, "w") as fh:
            fh.write("x,y\n")
            for a, b in traj:
                fh.write(f"{float(a)!r},{float(b)!r}\n")
        return specpol_main([
            "run", "--experiment", "trajectory_pipeline",
            "--input", str(csv_path), "--stride", "4", "--rank_r", "50",
            "--epsilon", "0.05", "--out", out_dir,
        ])


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "out/two_well"))
