"""Directed acyclic graphs, minimal layerings and ordering compatibility.

Adjacency is a dense d x d int8 matrix, entry (i, j) = 1 meaning a directed
edge i -> j.  Nodes are 0-based internally; file formats and figures use
1-based labels.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


class NotADagError(ValueError):
    """Raised when an operation requires an acyclic graph."""


class IncompatiblePartitionError(ValueError):
    """Raised when a class vector admits no ordering compatible with a DAG."""


@dataclass(frozen=True)
class Dag:
    """Immutable DAG over d labelled nodes.

    The adjacency matrix is copied, cast to int8 and frozen on construction.
    Acyclicity is an invariant of the operations, not of the constructor;
    use :func:`is_acyclic` to check.
    """

    adj: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adj, dtype=np.int8, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if np.any((adj != 0) & (adj != 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(np.diag(adj) != 0):
            raise ValueError("self-loops are not allowed")
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)

    @property
    def d(self) -> int:
        return self.adj.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum())

    def parents(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.adj[:, j])

    def children(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adj[i, :])

    def key(self) -> bytes:
        return self.adj.tobytes()

    @classmethod
    def empty(cls, d: int) -> "Dag":
        return cls(np.zeros((d, d), dtype=np.int8))

    @classmethod
    def from_edges(cls, d: int, edges, one_based: bool = True) -> "Dag":
        adj = np.zeros((d, d), dtype=np.int8)
        off = 1 if one_based else 0
        for i, j in edges:
            adj[i - off, j - off] = 1
        return cls(adj)

    def __eq__(self, other):
        return isinstance(other, Dag) and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash(self.key())


@dataclass(frozen=True)
class Layering:
    """Class assignment z (labels 1..K) plus an ordering of the classes.

    ``ordering[c-1]`` is the rank of class c.  For a rank-ordered layering
    (e.g. a minimal layering) the ordering is the identity and z already
    holds ranks.
    """

    z: np.ndarray
    ordering: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=np.int64, copy=True)
        ordering = np.array(self.ordering, dtype=np.int64, copy=True)
        K = int(z.max(initial=0))
        if ordering.shape != (K,) or sorted(ordering.tolist()) != list(range(1, K + 1)):
            raise ValueError("ordering must be a permutation of 1..K")
        m = np.bincount(z, minlength=K + 1)[1:]
        if np.any(m == 0):
            raise ValueError("every class 1..K must be non-empty")
        z.setflags(write=False)
        ordering.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "ordering", ordering)

    @classmethod
    def from_ranks(cls, ranks) -> "Layering":
        ranks = np.asarray(ranks, dtype=np.int64)
        K = int(ranks.max(initial=0))
        return cls(ranks, np.arange(1, K + 1))

    @property
    def d(self) -> int:
        return self.z.shape[0]

    @property
    def K(self) -> int:
        return int(self.z.max(initial=0))

    @property
    def m(self) -> np.ndarray:
        """Occupation counts per class label (index 0 = class 1)."""
        return np.bincount(self.z, minlength=self.K + 1)[1:]

    def ranks(self) -> np.ndarray:
        """Per-node rank after applying the class ordering."""
        return self.ordering[self.z - 1]


def topological_order(adj: np.ndarray):
    """Kahn topological sort; returns node order or None if cyclic."""
    adj = np.asarray(adj)
    d = adj.shape[0]
    indeg = adj.sum(axis=0).astype(np.int64)
    stack = [v for v in range(d) if indeg[v] == 0]
    order = []
    while stack:
        v = stack.pop()
        order.append(v)
        for c in np.flatnonzero(adj[v, :]):
            indeg[c] -= 1
            if indeg[c] == 0:
                stack.append(int(c))
    if len(order) != d:
        return None
    return order


def is_acyclic(g: Dag) -> bool:
    return topological_order(g.adj) is not None


def minimal_ranks(adj: np.ndarray) -> np.ndarray:
    """Longest-path ranks: 1 for parentless nodes, else 1 + max parent rank."""
    order = topological_order(adj)
    if order is None:
        raise NotADagError("not a DAG")
    d = adj.shape[0]
    ranks = np.ones(d, dtype=np.int64)
    for v in order:
        pa = np.flatnonzero(adj[:, v])
        if pa.size:
            ranks[v] = ranks[pa].max() + 1
    return ranks


def minimal_layering(g: Dag) -> Layering:
    """Minimal layering of an acyclic graph (fewest layers, ranks as low as
    possible), computed as longest-path ranks."""
    return Layering.from_ranks(minimal_ranks(g.adj))


def count_compatible_orderings(g: Dag, z) -> int:
    """Number of class permutations rho such that every edge of g goes from a
    lower-rho class to a higher-rho class.

    Exhaustive over the K! permutations with a precedence prefilter; K is
    small in this setting.
    """
    z = np.asarray(z, dtype=np.int64)
    K = int(z.max(initial=0))
    if K > 8:
        raise ValueError("ordering count supported for K <= 8")
    src, dst = np.nonzero(g.adj)
    prec = np.zeros((K + 1, K + 1), dtype=bool)
    for a, b in zip(z[src], z[dst]):
        if a == b:
            raise IncompatiblePartitionError("incompatible partition: edge within a class")
        prec[a, b] = True
    if np.any(prec & prec.T):
        raise IncompatiblePartitionError("incompatible partition: contradictory precedence")
    count = 0
    for perm in itertools.permutations(range(1, K + 1)):
        rank = {c: r for r, c in enumerate(perm)}
        if all(rank[a] < rank[b] for a in range(1, K + 1) for b in range(1, K + 1) if prec[a, b]):
            count += 1
    if count == 0:
        raise IncompatiblePartitionError("incompatible partition: no compatible ordering")
    return count


def relayer_after_removal(g: Dag, layering: Layering, changed) -> Layering:
    """Re-derive ranks of the changed nodes and, recursively, their
    descendants so each sits at 1 + max parent rank.

    With ``changed`` covering every node whose parent set was perturbed, the
    result equals the minimal layering of g.
    """
    adj = g.adj
    order = topological_order(adj)
    if order is None:
        raise NotADagError("not a DAG")
    ranks = np.array(layering.ranks(), dtype=np.int64)
    affected = set(int(v) for v in changed)
    for v in order:
        if v not in affected:
            continue
        pa = np.flatnonzero(adj[:, v])
        new_rank = int(ranks[pa].max() + 1) if pa.size else 1
        if new_rank != ranks[v]:
            ranks[v] = new_rank
            affected.update(int(c) for c in np.flatnonzero(adj[v, :]))
    return Layering.from_ranks(ranks)


def adding_edge_creates_cycle(adj: np.ndarray, i: int, j: int) -> bool:
    """True iff adding edge i -> j to the acyclic graph creates a cycle,
    i.e. there is already a directed path j -> i."""
    if i == j:
        return True
    d = adj.shape[0]
    seen = np.zeros(d, dtype=bool)
    stack = [j]
    seen[j] = True
    while stack:
        v = stack.pop()
        for c in np.flatnonzero(adj[v, :]):
            if c == i:
                return True
            if not seen[c]:
                seen[c] = True
                stack.append(int(c))
    return False


def enumerate_dags(d: int):
    """Yield every DAG on d labelled nodes.  Exponential; intended for d <= 5."""
    slots = [(i, j) for i in range(d) for j in range(d) if i != j]
    for bits in range(1 << len(slots)):
        adj = np.zeros((d, d), dtype=np.int8)
        for k, (i, j) in enumerate(slots):
            if bits >> k & 1:
                adj[i, j] = 1
        if topological_order(adj) is not None:
            yield Dag(adj)


def write_adjacency(g: Dag, path) -> None:
    """Adjacency text format: a header line with d, then d rows of d
    space-separated 0/1 entries."""
    with open(path, "w") as fh:
        fh.write(f"{g.d}\n")
        for row in g.adj:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def read_adjacency(path) -> Dag:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    d = int(lines[0])
    if len(lines) != d + 1:
        raise ValueError(f"expected {d} adjacency rows, got {len(lines) - 1}")
    adj = np.array([[int(v) for v in ln.split()] for ln in lines[1:]], dtype=np.int8)
    if adj.shape != (d, d):
        raise ValueError("malformed adjacency matrix")
    return Dag(adj)
