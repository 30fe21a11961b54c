"""Shared test utilities: random DAGs and independent oracles."""
import itertools

import numpy as np

from blockdag.dag import Dag


def random_dag(d, rng, p=0.3):
    """Random DAG via a random node order and upper-triangular coin flips."""
    perm = rng.permutation(d)
    adj = np.zeros((d, d), dtype=np.int8)
    for a in range(d):
        for b in range(a + 1, d):
            if rng.random() < p:
                adj[perm[a], perm[b]] = 1
    return Dag(adj)


def brute_force_longest_path_ranks(adj):
    """Independent oracle: rank(v) = 1 + length of the longest directed path
    ending at v, by recursive path search (no DP over a topological order)."""
    d = adj.shape[0]

    def longest_to(v, visited):
        best = 0
        for p in np.flatnonzero(adj[:, v]):
            if p not in visited:
                best = max(best, 1 + longest_to(int(p), visited | {int(p)}))
        return best

    return np.array([1 + longest_to(v, {v}) for v in range(d)], dtype=np.int64)


def brute_force_ordering_count(adj, z):
    """Independent oracle: scan all K! class permutations and count those
    where every edge runs from a lower to a higher position."""
    z = np.asarray(z)
    K = int(z.max())
    edges = list(zip(*np.nonzero(adj)))
    count = 0
    for perm in itertools.permutations(range(1, K + 1)):
        pos = {c: i for i, c in enumerate(perm)}
        if all(pos[int(z[i])] < pos[int(z[j])] for i, j in edges):
            count += 1
    return count
