"""Figure assembly: trajectory panels and heat-map panels, one figure per
prior.  Styling is fixed so identical inputs yield identical image bytes."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import discover_priors, heatmap_paths, read_heatmap, read_trajectory, read_truth_scores

TRAJ_PANELS = [("log_prior", "log prior"),
               ("log_lik", "log likelihood"),
               ("log_score", "log score")]

# strip the writer version so re-rendering is byte-stable across installs
_PNG_METADATA = {"Software": None}


@dataclass
class PlotSpec:
    """What to render: a run directory, a figure selection and a target
    directory for the image files."""

    in_dir: Path
    which: str = "all"
    out_dir: Path = None

    def __post_init__(self):
        if self.which not in ("trajectories", "heatmaps", "all"):
            raise ValueError(f"unknown figure selection {self.which!r}")
        self.in_dir = Path(self.in_dir)
        self.out_dir = Path(self.out_dir) if self.out_dir is not None else self.in_dir


def _render_trajectories(run_dir: Path, prior: str, chains, out_path: Path):
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    data = [read_trajectory(p) for p in chains]
    truth = read_truth_scores(run_dir / f"truth_{prior}.csv")
    for ax, ((col, label), truth_val) in zip(
            axes, zip(TRAJ_PANELS, truth if truth else (None, None, None))):
        for ci, traj in enumerate(data):
            ax.plot(traj["iter"], traj[col], linewidth=0.8,
                    color=plt.cm.tab10(ci % 10))
        if truth_val is not None:
            ax.axhline(truth_val, color="black", linewidth=1.5,
                       label="true network")
            ax.legend(loc="lower right", fontsize=8)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[-1].set_xlabel("iteration")
    fig.suptitle(f"{prior} prior: {len(data)} chains")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def _render_heatmaps(run_dir: Path, prior: str, out_path: Path):
    panels = heatmap_paths(run_dir, prior)
    mats = {name: read_heatmap(path) for name, path in panels.items()}
    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for ax, (name, mat) in zip(axes, mats.items()):
        im = ax.imshow(mat, cmap="viridis", vmin=0.0, vmax=1.0)
        ax.set_title(name)
        ax.set_xlabel("child")
        ax.set_ylabel("parent")
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.suptitle(f"{prior} prior: edge-inclusion frequencies")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def render(spec: PlotSpec) -> list:
    """Write the selected figures and return the image paths."""
    priors = discover_priors(spec.in_dir)
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for prior, chains in priors.items():
        if spec.which in ("trajectories", "all"):
            path = spec.out_dir / f"trajectories_{prior}.png"
            _render_trajectories(spec.in_dir, prior, chains, path)
            written.append(path)
        if spec.which in ("heatmaps", "all"):
            path = spec.out_dir / f"heatmaps_{prior}.png"
            _render_heatmaps(spec.in_dir, prior, path)
            written.append(path)
    return written
