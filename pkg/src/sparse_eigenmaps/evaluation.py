"""Downstream metrics on embeddings: k-means, adjusted Rand index, pairwise AP."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb


def _coords(e) -> np.ndarray:
    return np.asarray(getattr(e, "coordinates", e), dtype=np.float64)


@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    converged: bool
    n_iter: int
    history: list = field(default_factory=list)


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = [x[rng.integers(n)]]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # fewer distinct points than k; any remaining point will do
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers.append(x[idx])
        d2 = np.minimum(d2, np.sum((x - x[idx]) ** 2, axis=1))
    return np.array(centers)


def _assign(x: np.ndarray, centers: np.ndarray):
    d2 = (
        np.sum(x**2, axis=1)[:, None]
        - 2.0 * x @ centers.T
        + np.sum(centers**2, axis=1)[None, :]
    )
    d2 = np.maximum(d2, 0.0)
    labels = np.argmin(d2, axis=1)
    return labels, float(d2[np.arange(x.shape[0]), labels].sum())


def _lloyd(x, k, rng, max_iter, tol) -> KMeansResult:
    centers = _kmeans_pp(x, k, rng)
    labels, inertia = _assign(x, centers)
    history = [inertia]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new_centers = centers.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new_centers[j] = x[members].mean(axis=0)
        new_labels, new_inertia = _assign(x, new_centers)
        history.append(new_inertia)
        shift = np.max(np.abs(new_centers - centers))
        centers, labels, inertia = new_centers, new_labels, new_inertia
        if shift <= tol:
            converged = True
            break
    return KMeansResult(labels, centers, inertia, converged, it, history)


def kmeans(embedding, k: int, seed=None, max_iter: int = 300, n_init: int = 10,
           tol: float = 1e-10, return_result: bool = False):
    """Lloyd's algorithm with k-means++ seeding, best of ``n_init`` restarts.

    Labels are renumbered by first appearance so that equal partitions give
    equal label vectors.
    """
    x = _coords(embedding)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must lie in [1, {n}]")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        res = _lloyd(x, k, rng, max_iter, tol)
        if best is None or res.inertia < best.inertia:
            best = res
    _, first = np.unique(best.labels, return_index=True)
    remap = np.empty(k, dtype=np.int64)
    remap[:] = -1
    remap[best.labels[np.sort(first)]] = np.arange(first.shape[0])
    best.labels = remap[best.labels]
    return best if return_result else best.labels


def contingency_table(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"label vectors must have equal length, got {a.shape} and {b.shape}")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max(initial=-1) + 1, bi.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def adjusted_rand_index(a, b) -> float:
    """Hubert-Arabie adjusted Rand index.

    Defined as 1.0 when the chance-corrected denominator vanishes, which
    happens when both partitions are trivial (all-one-cluster or
    all-singletons) in the same way.
    """
    table = contingency_table(a, b)
    n = int(table.sum())
    index = comb(table, 2).sum()
    sum_a = comb(table.sum(axis=1), 2).sum()
    sum_b = comb(table.sum(axis=0), 2).sum()
    total = comb(n, 2)
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return float((index - expected) / (max_index - expected))


def average_precision(embedding, labels) -> float:
    """Pairwise-retrieval AP over all unordered pairs.

    Pairs are ranked by increasing Euclidean distance; ties keep the order
    of ``(i, j)`` pairs with ``i < j`` in row-major order. A pair is
    relevant when both points share a label.
    """
    x = _coords(embedding)
    if x.ndim == 1:
        x = x[:, None]
    labels = np.asarray(labels)
    if labels.shape[0] != x.shape[0]:
        raise ValueError("labels and embedding have different lengths")
    iu = np.triu_indices(x.shape[0], k=1)
    dist = np.linalg.norm(x[iu[0]] - x[iu[1]], axis=1)
    relevant = labels[iu[0]] == labels[iu[1]]
    if not relevant.any():
        raise ValueError("no same-label pairs; average precision undefined")
    order = np.argsort(dist, kind="stable")
    hits = relevant[order]
    ranks = np.nonzero(hits)[0] + 1
    precision = np.arange(1, ranks.shape[0] + 1) / ranks
    return float(precision.mean())
