"""Skeleton-level recovery metrics and edge-frequency heat maps."""
from __future__ import annotations

import warnings

import numpy as np

from .dag import Dag


def skeleton(g: Dag) -> np.ndarray:
    """Symmetric boolean matrix: True where an edge exists in either
    direction."""
    a = g.adj.astype(bool)
    return a | a.T


def _check_dims(learned: Dag, truth: Dag):
    if learned.d != truth.d:
        raise ValueError("dimension mismatch between learned and true graphs")


def tpr(learned: Dag, truth: Dag) -> float:
    """Skeleton true-positive rate: correctly identified edges over the true
    skeleton size.  Vacuously 1 for an empty truth."""
    _check_dims(learned, truth)
    sk_l, sk_t = skeleton(learned), skeleton(truth)
    n_true = int(np.triu(sk_t).sum())
    if n_true == 0:
        return 1.0
    n_correct = int(np.triu(sk_l & sk_t).sum())
    return n_correct / n_true


def spc(learned: Dag, truth: Dag) -> float:
    """The paper-style specificity: true skeleton size over (true skeleton
    size + wrongly included skeleton edges)."""
    _check_dims(learned, truth)
    sk_l, sk_t = skeleton(learned), skeleton(truth)
    n_true = int(np.triu(sk_t).sum())
    n_wrong = int(np.triu(sk_l & ~sk_t).sum())
    return n_true / (n_true + n_wrong) if (n_true + n_wrong) else 1.0


def specificity_conventional(learned: Dag, truth: Dag) -> float:
    """Conventional specificity TN / (TN + FP) over skeleton slots, reported
    alongside the paper-style SPC for sanity."""
    _check_dims(learned, truth)
    d = truth.d
    sk_l, sk_t = skeleton(learned), skeleton(truth)
    slots = d * (d - 1) // 2
    fp = int(np.triu(sk_l & ~sk_t).sum())
    tn = slots - int(np.triu(sk_t | sk_l).sum()) + 0  # absent in both
    return tn / (tn + fp) if (tn + fp) else 1.0


def top_scoring_graphs(trajectories, top_k: int):
    """Pooled top-k (graph, score) entries across chains, kept with
    multiplicity; ties broken by fewer edges then encounter order."""
    pool = []
    for ci, traj in enumerate(trajectories):
        if traj.graphs is None:
            raise ValueError("trajectories must retain graphs for ranking")
        for t, adj in enumerate(traj.graphs):
            pool.append((-traj.log_score[t], int(adj.sum()), ci, t, adj))
    if top_k > len(pool):
        warnings.warn(f"top_k={top_k} exceeds pool size {len(pool)}; using all")
        top_k = len(pool)
    pool.sort(key=lambda e: e[:4])
    return [(Dag(e[4]), -e[0]) for e in pool[:top_k]]


def aggregate_heatmaps(trajectories, top_k: int = 100) -> dict:
    """Edge-inclusion frequency maps over three graph sets: the pooled top-k,
    the single overall best, and the per-chain bests."""
    if not trajectories:
        raise ValueError("no trajectories given")
    d = trajectories[0].best_graph.d
    top = top_scoring_graphs(trajectories, top_k)
    top_map = np.mean([g.adj for g, _ in top], axis=0)
    bests = [(traj.best_score, int(traj.best_graph.edge_count), traj.best_graph)
             for traj in trajectories]
    overall = max(bests, key=lambda e: (e[0], -e[1]))[2]
    chain_map = np.mean([g.adj for _, _, g in bests], axis=0)
    return {
        "top_pool": top_map.astype(float),
        "overall_best": overall.adj.astype(float),
        "chain_bests": chain_map.astype(float),
    }


def write_heatmap_csv(mat: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        for row in mat:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
