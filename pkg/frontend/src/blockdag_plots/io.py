"""Readers for the run-directory CSV contracts."""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

TRAJ_HEADER = "iter,log_prior,log_lik,log_score,edges,K"
TRUTH_HEADER = "log_prior,log_lik,log_score"

_TRAJ_RE = re.compile(r"^traj_(.+)_chain(\d+)\.csv$")


class PlotInputError(ValueError):
    """A required CSV is missing, empty or malformed; the message names it."""


def discover_priors(run_dir) -> dict:
    """Map prior name -> sorted list of trajectory CSV paths in run_dir."""
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise PlotInputError(f"run directory not found: {run_dir}")
    found: dict = {}
    for path in run_dir.iterdir():
        m = _TRAJ_RE.match(path.name)
        if m:
            found.setdefault(m.group(1), []).append((int(m.group(2)), path))
    if not found:
        raise PlotInputError(f"no trajectory CSVs (traj_*_chain*.csv) in {run_dir}")
    return {name: [p for _, p in sorted(chains)] for name, chains in sorted(found.items())}


def read_trajectory(path) -> dict:
    """Columns of one chain trajectory as float/int arrays."""
    path = Path(path)
    if not path.is_file():
        raise PlotInputError(f"trajectory file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines or lines[0] != TRAJ_HEADER:
        raise PlotInputError(f"malformed trajectory header in {path}")
    if len(lines) < 2:
        raise PlotInputError(f"empty trajectory file: {path}")
    try:
        rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise PlotInputError(f"malformed trajectory row in {path}: {exc}") from exc
    if rows.shape[1] != 6:
        raise PlotInputError(f"wrong column count in {path}")
    return {
        "iter": rows[:, 0].astype(int),
        "log_prior": rows[:, 1],
        "log_lik": rows[:, 2],
        "log_score": rows[:, 3],
        "edges": rows[:, 4].astype(int),
        "K": rows[:, 5].astype(int),
    }


def read_truth_scores(path):
    """(log_prior, log_lik, log_score) of the true network, or None when the
    file does not exist."""
    path = Path(path)
    if not path.is_file():
        return None
    lines = path.read_text().splitlines()
    if len(lines) < 2 or lines[0] != TRUTH_HEADER:
        raise PlotInputError(f"malformed truth score file: {path}")
    try:
        vals = tuple(float(v) for v in lines[1].split(","))
    except ValueError as exc:
        raise PlotInputError(f"malformed truth score row in {path}: {exc}") from exc
    if len(vals) != 3:
        raise PlotInputError(f"wrong column count in {path}")
    return vals


def read_heatmap(path) -> np.ndarray:
    """Square matrix of edge frequencies in [0, 1]."""
    path = Path(path)
    if not path.is_file():
        raise PlotInputError(f"heat map file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines:
        raise PlotInputError(f"empty heat map file: {path}")
    try:
        mat = np.array([[float(v) for v in ln.split(",")] for ln in lines])
    except ValueError as exc:
        raise PlotInputError(f"malformed heat map row in {path}: {exc}") from exc
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise PlotInputError(f"heat map in {path} is not square")
    if mat.min() < 0.0 or mat.max() > 1.0:
        raise PlotInputError(f"heat map values outside [0, 1] in {path}")
    return mat


def heatmap_paths(run_dir, prior: str) -> dict:
    """The three heat-map CSVs for one prior, keyed by panel name."""
    run_dir = Path(run_dir)
    tops = sorted(run_dir.glob(f"heatmap_{prior}_top*.csv"))
    if not tops:
        raise PlotInputError(f"heat map file not found: {run_dir / f'heatmap_{prior}_top*.csv'}")
    return {
        "top pool": tops[0],
        "overall best": run_dir / f"heatmap_{prior}_best.csv",
        "chain bests": run_dir / f"heatmap_{prior}_perchain.csv",
    }
