"""Cooper-Herskovits marginal likelihood for categorical data.

The likelihood factorises over child families (child, parent set); family
scores are memoised because the samplers re-score the same families
constantly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .dag import Dag, adding_edge_creates_cycle

log = logging.getLogger(__name__)


class IllegalEdgeError(ValueError):
    """Raised when an edge addition would create a directed cycle."""


@dataclass(frozen=True)
class DataMatrix:
    """n x d categorical observations with per-variable cardinalities."""

    values: np.ndarray
    cards: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.int64, copy=True)
        cards = np.array(self.cards, dtype=np.int64, copy=True)
        if values.ndim != 2:
            raise ValueError("values must be an n x d matrix")
        if cards.shape != (values.shape[1],):
            raise ValueError("cards must have one entry per column")
        if np.any(cards < 2):
            raise ValueError("every cardinality must be >= 2")
        if values.size:
            if values.min() < 0 or np.any(values.max(axis=0) >= cards):
                raise ValueError("values out of range for the declared cardinalities")
        values.setflags(write=False)
        cards.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "cards", cards)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path) -> None:
        """Optional `card:` header, then n rows of comma-separated integers."""
        with open(path, "w") as fh:
            fh.write("card:" + ",".join(str(int(c)) for c in self.cards) + "\n")
            for row in self.values:
                fh.write(",".join(str(int(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "DataMatrix":
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        cards = None
        if lines and lines[0].startswith("card:"):
            cards = np.array([int(v) for v in lines[0][5:].split(",")], dtype=np.int64)
            lines = lines[1:]
        values = np.array([[int(v) for v in ln.split(",")] for ln in lines], dtype=np.int64)
        if cards is None:
            # unseen states change the score, so make the inference visible
            cards = values.max(axis=0) + 1 if values.size else None
            if cards is None:
                raise ValueError("cannot infer cardinalities from an empty file")
            cards = np.maximum(cards, 2)
            log.info("no card: header in %s; inferred cardinalities %s", path, cards.tolist())
        return cls(values, cards)


def family_log_score(child: int, parents, data: DataMatrix, gamma: float) -> float:
    """Log of the per-child factor of the Cooper-Herskovits likelihood.

    Counts are gathered in one pass with a mixed-radix encoding of the
    parent configuration; parent configurations with zero counts contribute
    nothing.
    """
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    if data.n == 0:
        return 0.0
    parents = tuple(sorted(int(p) for p in parents))
    pj = int(data.cards[child])
    x = data.values
    if parents:
        codes = np.zeros(data.n, dtype=np.int64)
        for p in parents:
            codes = codes * int(data.cards[p]) + x[:, p]
    else:
        codes = np.zeros(data.n, dtype=np.int64)
    joint = codes * pj + x[:, child]
    uniq, cnt = np.unique(joint, return_counts=True)
    cfg = uniq // pj
    # per observed parent configuration: Gamma(p_j*gamma) / Gamma(n_l + p_j*gamma)
    cfg_uniq, cfg_inv = np.unique(cfg, return_inverse=True)
    n_l = np.zeros(cfg_uniq.size, dtype=np.int64)
    np.add.at(n_l, cfg_inv, cnt)
    score = float(np.sum(gammaln(pj * gamma) - gammaln(n_l + pj * gamma)))
    score += float(np.sum(gammaln(gamma + cnt) - gammaln(gamma)))
    return score


class FamilyCache:
    """Memo of family scores for one (data, gamma) pair, keyed by
    (child, sorted parent tuple)."""

    def __init__(self, data: DataMatrix, gamma: float, max_size: int = None):
        self.data = data
        self.gamma = float(gamma)
        self.max_size = max_size
        self.hits = 0
        self.misses = 0
        self._store: dict = {}

    def score(self, child: int, parents) -> float:
        key = (int(child), tuple(sorted(int(p) for p in parents)))
        got = self._store.get(key)
        if got is not None:
            self.hits += 1
            return got
        self.misses += 1
        val = family_log_score(key[0], key[1], self.data, self.gamma)
        if self.max_size is None or len(self._store) < self.max_size:
            self._store[key] = val
        return val


def ch_log_likelihood(g: Dag, data: DataMatrix, gamma: float,
                      cache: FamilyCache = None) -> float:
    """Full Cooper-Herskovits log likelihood: sum of family scores."""
    if g.d != data.d:
        raise ValueError("graph and data dimension mismatch")
    if cache is not None:
        return float(sum(cache.score(j, g.parents(j)) for j in range(g.d)))
    return float(sum(family_log_score(j, g.parents(j), data, gamma) for j in range(g.d)))


def ch_log_ratio_toggle(g_minus: Dag, i: int, j: int, data: DataMatrix,
                        gamma: float, cache: FamilyCache = None) -> float:
    """Log-likelihood change from adding edge i -> j; only child j's family
    term changes."""
    if g_minus.adj[i, j]:
        raise ValueError("edge already present")
    if adding_edge_creates_cycle(g_minus.adj, i, j):
        raise IllegalEdgeError("illegal edge")
    old_parents = tuple(g_minus.parents(j))
    new_parents = tuple(sorted(old_parents + (i,)))
    if cache is not None:
        return cache.score(j, new_parents) - cache.score(j, old_parents)
    return (family_log_score(j, new_parents, data, gamma)
            - family_log_score(j, old_parents, data, gamma))
