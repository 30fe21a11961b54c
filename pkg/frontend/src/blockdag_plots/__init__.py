"""Batch figure rendering for search-run output directories.

Strictly a consumer of the run CSVs (trajectories, heat maps, truth scores);
no scoring logic lives here.
"""
from .io import PlotInputError, discover_priors, read_heatmap, read_trajectory, read_truth_scores
from .render import PlotSpec, render

__all__ = [
    "PlotInputError",
    "PlotSpec",
    "discover_priors",
    "read_heatmap",
    "read_trajectory",
    "read_truth_scores",
    "render",
]
