"""Hoppe-Ewens urn over class assignment vectors.

A class vector z is feasible when z_1 = 1 and each later entry is at most
one more than the running maximum (labels appear in order of first use).
"""
from __future__ import annotations

from math import lgamma, log

import numpy as np


class InfeasiblePartitionError(ValueError):
    """Raised for vectors outside the feasible set of urn outcomes."""


def is_feasible(z) -> bool:
    z = np.asarray(z, dtype=np.int64)
    if z.size == 0 or z[0] != 1 or z.min() < 1:
        return False
    running_max = np.maximum.accumulate(z)
    return bool(np.all(z[1:] <= running_max[:-1] + 1))


def sample_partition(d: int, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Draw one class vector of length d from the urn with weight alpha."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    z = np.ones(d, dtype=np.int64)
    if alpha == 0.0:
        return z
    counts = [1]  # occupation per class label, in label order
    for j in range(1, d):
        u = rng.random() * (alpha + j)
        if u >= j:
            counts.append(1)
            z[j] = len(counts)
        else:
            acc = 0.0
            for label, c in enumerate(counts, start=1):
                acc += c
                if u < acc:
                    counts[label - 1] += 1
                    z[j] = label
                    break
    return z


def sample_partitions(d: int, alpha: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorised batch of urn draws; returns a (size, d) matrix of class
    vectors.  Distributionally identical to repeated sample_partition calls."""
    if d < 1 or size < 1:
        raise ValueError("d and size must be >= 1")
    z = np.ones((size, d), dtype=np.int64)
    if alpha == 0.0 or d == 1:
        return z
    counts = np.zeros((size, d + 1), dtype=np.int64)
    counts[:, 1] = 1
    kmax = np.ones(size, dtype=np.int64)
    for j in range(1, d):
        u = rng.random(size) * (alpha + j)
        new = u >= j
        cum = np.cumsum(counts[:, 1:], axis=1)
        label = 1 + (u[:, None] >= cum).sum(axis=1)
        label = np.where(new, kmax + 1, np.minimum(label, kmax))
        z[:, j] = label
        counts[np.arange(size), label] += 1
        kmax = np.maximum(kmax, label)
    return z


def log_partition_prob(z, alpha: float) -> float:
    """Log probability of a feasible class vector under the urn:
    alpha^K Gamma(alpha) / Gamma(d + alpha) * prod_k (m_k - 1)!."""
    z = np.asarray(z, dtype=np.int64)
    if not is_feasible(z):
        raise InfeasiblePartitionError("infeasible partition")
    d = z.size
    K = int(z.max())
    if alpha == 0.0:
        return 0.0 if K == 1 else -np.inf
    m = np.bincount(z, minlength=K + 1)[1:]
    return (
        K * log(alpha)
        + lgamma(alpha)
        - lgamma(d + alpha)
        + float(sum(lgamma(mk) for mk in m))
    )


def expected_num_cells(d: int, alpha: float) -> float:
    """Expected class count: sum_{i=1}^{d} alpha / (alpha + i - 1)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    return float(sum(alpha / (alpha + i) for i in range(d)))


def enumerate_partitions(d: int):
    """Yield every feasible class vector of length d (Bell(d) of them)."""
    def rec(prefix, kmax):
        if len(prefix) == d:
            yield np.array(prefix, dtype=np.int64)
            return
        for label in range(1, kmax + 2):
            yield from rec(prefix + [label], max(kmax, label))

    yield from rec([1], 1)
