"""Forward sampling of categorical Bayesian networks and the HEPAR II
experiment structure."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dag import Dag, topological_order
from .likelihood import DataMatrix

# Rows of the HEPAR II figure: risk factors 1-4, diseases 5-8, symptoms 9-12.
HEPAR2_EDGES = [
    (1, 5), (1, 6), (1, 7),
    (2, 6), (2, 7), (2, 8),
    (3, 5), (3, 6), (3, 8),
    (4, 5), (4, 7), (4, 8),
    (5, 9), (5, 11), (5, 12),
    (6, 10), (6, 11), (6, 12),
    (7, 9), (7, 10), (7, 11),
    (8, 9), (8, 10), (8, 12),
]


def hepar2_structure() -> Dag:
    """The 12-node, 24-edge liver-disease network used in the experiments."""
    return Dag.from_edges(12, HEPAR2_EDGES, one_based=True)


@dataclass(frozen=True)
class CptNetwork:
    """DAG plus one conditional probability table per node.

    cpts[j] has shape (prod of parent cardinalities, cards[j]); parent
    configurations are indexed in mixed radix over the sorted parent list.
    """

    structure: Dag
    cards: np.ndarray
    cpts: tuple

    def __post_init__(self):
        cards = np.array(self.cards, dtype=np.int64, copy=True)
        cards.setflags(write=False)
        object.__setattr__(self, "cards", cards)
        cpts = tuple(np.asarray(t, dtype=np.float64) for t in self.cpts)
        for j, table in enumerate(cpts):
            q = int(np.prod(cards[self.structure.parents(j)], initial=1))
            if table.shape != (q, int(cards[j])):
                raise ValueError(f"cpt for node {j} has shape {table.shape}, expected {(q, int(cards[j]))}")
            if np.any(np.abs(table.sum(axis=1) - 1.0) > 1e-12):
                raise ValueError(f"cpt rows for node {j} must sum to 1")
        object.__setattr__(self, "cpts", cpts)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"{self.structure.d}\n")
            for row in self.structure.adj:
                fh.write(" ".join(str(int(v)) for v in row) + "\n")
            for j, table in enumerate(self.cpts):
                fh.write(f"NODE {j} CARD {int(self.cards[j])} ROWS {table.shape[0]}\n")
                for row in table:
                    fh.write(" ".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def load(cls, path) -> "CptNetwork":
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
        d = int(lines[0])
        adj = np.array([[int(v) for v in ln.split()] for ln in lines[1:d + 1]], dtype=np.int8)
        pos = d + 1
        cards = np.zeros(d, dtype=np.int64)
        tables = [None] * d
        while pos < len(lines):
            _, j, _, card, _, rows = lines[pos].split()
            j, card, rows = int(j), int(card), int(rows)
            cards[j] = card
            tables[j] = np.array([[float(v) for v in ln.split()]
                                  for ln in lines[pos + 1:pos + 1 + rows]])
            pos += 1 + rows
        return cls(Dag(adj), cards, tuple(tables))


def random_cpts(structure: Dag, cards, rng: np.random.Generator,
                a: float = 0.5, b: float = 0.5, lo: float = 0.1, hi: float = 0.9,
                adjust: str = "clamp") -> CptNetwork:
    """Binary CPTs with Bernoulli parameters drawn Beta(a, b) and adjusted
    into [lo, hi], either by clamping (default) or by resampling until in
    range."""
    cards = np.asarray(cards, dtype=np.int64)
    if lo >= hi:
        raise ValueError("lo must be < hi")
    if adjust not in ("clamp", "resample"):
        raise ValueError(f"unknown adjust policy {adjust!r}")
    if np.any(cards != 2):
        raise ValueError("the Beta CPT recipe is defined for binary variables")
    tables = []
    for j in range(structure.d):
        q = int(np.prod(cards[structure.parents(j)], initial=1))
        theta = rng.beta(a, b, size=q)
        if adjust == "clamp":
            theta = np.clip(theta, lo, hi)
        else:
            bad = (theta < lo) | (theta > hi)
            while np.any(bad):
                theta[bad] = rng.beta(a, b, size=int(bad.sum()))
                bad = (theta < lo) | (theta > hi)
        tables.append(np.column_stack([1.0 - theta, theta]))
    return CptNetwork(structure, cards, tuple(tables))


def forward_sample(net: CptNetwork, n: int, rng: np.random.Generator) -> DataMatrix:
    """n i.i.d. rows, each node sampled in topological order from its CPT row
    given the sampled parent values."""
    d = net.structure.d
    values = np.zeros((n, d), dtype=np.int64)
    if n == 0:
        return DataMatrix(values, net.cards)
    order = topological_order(net.structure.adj)
    for j in order:
        parents = sorted(int(p) for p in net.structure.parents(j))
        codes = np.zeros(n, dtype=np.int64)
        for p in parents:
            codes = codes * int(net.cards[p]) + values[:, p]
        probs = net.cpts[j][codes]
        u = rng.random(n)
        values[:, j] = np.minimum((u[:, None] > np.cumsum(probs, axis=1)).sum(axis=1),
                                  int(net.cards[j]) - 1)
    return DataMatrix(values, net.cards)
