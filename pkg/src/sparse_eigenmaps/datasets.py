"""Synthetic point clouds, Gaussian kernels and loaders for external graphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .matrixcore import as_symmetric, load_matrix_csv

log = logging.getLogger(__name__)

# Paper configuration for the high-dimensional swiss roll.
SWISS_ROLL_DEFAULTS = {"n": 5000, "d_star": 6, "c": 5.0}
DEFAULT_SIGMA = 0.2


def sample_swiss_roll(n: int, d_star: int = 6, c: float = 5.0, seed=None) -> np.ndarray:
    """Sample ``n`` points of a ``d_star``-dimensional swiss roll in ``d_star + 1`` dims.

    Points ``(x, y)`` are drawn uniformly from the unit cube ``[0, 1]^d_star``
    with ``x`` the first coordinate and ``y`` the remaining ``d_star - 1``,
    then mapped to ``(c x cos(c x), y, c x sin(c x))``. No rescaling is
    applied afterwards.

    Parameters
    ----------
    n : int
        Number of points, at least 1.
    d_star : int
        Intrinsic dimension, at least 2.
    c : float
        Curvature, positive.
    seed : int or numpy.random.Generator, optional

    Returns
    -------
    points : (n, d_star + 1) ndarray
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if d_star < 2:
        raise ValueError("d_star must be at least 2")
    if not c > 0:
        raise ValueError("curvature c must be positive")
    rng = np.random.default_rng(seed)
    cube = rng.random((n, d_star))
    return swiss_roll_transform(cube, c)


def swiss_roll_transform(cube: np.ndarray, c: float) -> np.ndarray:
    x = cube[:, :1]
    y = cube[:, 1:]
    t = c * x
    return np.hstack([t * np.cos(t), y, t * np.sin(t)])


def pairwise_distances(points) -> np.ndarray:
    """Euclidean distance matrix, exactly hollow and symmetric."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("points must be a non-empty (n, dim) array")
    if not np.all(np.isfinite(points)):
        raise ValueError("points contain non-finite coordinates")
    if points.shape[0] == 1:
        return as_symmetric(np.zeros((1, 1)))
    return as_symmetric(squareform(pdist(points)))


def gaussian_kernel(distances, sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    """Hollow Gaussian kernel ``exp(-d^2 / sigma^2)`` with a zero diagonal."""
    if not sigma > 0:
        raise ValueError("kernel bandwidth sigma must be positive")
    d = np.asarray(distances, dtype=np.float64)
    k = np.exp(-(d**2) / sigma**2)
    np.fill_diagonal(k, 0.0)
    return as_symmetric(k)


def check_kernel(k: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    """Validate a kernel matrix: symmetric, entries in [0, 1]; the diagonal is zeroed."""
    k = np.array(k, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ValueError(f"kernel must be square, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("kernel contains non-finite entries")
    if k.min(initial=0.0) < 0.0 or k.max(initial=0.0) > 1.0:
        raise ValueError("kernel entries must lie in [0, 1]")
    if not np.allclose(k, k.T, rtol=0.0, atol=atol):
        raise ValueError("kernel matrix is not symmetric")
    np.fill_diagonal(k, 0.0)
    return as_symmetric(k, atol=atol)


def load_kernel_csv(path) -> np.ndarray:
    """Read a dense kernel matrix from headerless CSV.

    A nonzero diagonal is dropped, since kernels are hollow by definition.
    """
    return check_kernel(load_matrix_csv(path))


@dataclass(frozen=True)
class EdgeList:
    """A kernel built from an edge list, plus what was discarded on the way."""

    kernel: np.ndarray
    duplicates: int = 0
    self_loops: int = 0


def load_edge_list(path, n: int, default_weight: float = 1.0) -> EdgeList:
    """Build a symmetric hollow kernel from an ``i j [w]`` edge list.

    Indices are 0-based, ``#`` starts a comment, and a missing weight means
    ``default_weight``. Repeated edges keep the last weight; self-loops are
    skipped. Both are counted on the result.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    k = np.zeros((n, n))
    seen = set()
    duplicates = self_loops = 0
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise ValueError(f"{path}:{lineno}: expected 'i j [w]', got {raw!r}")
        i, j = int(fields[0]), int(fields[1])
        w = float(fields[2]) if len(fields) == 3 else default_weight
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"{path}:{lineno}: vertex index out of range [0, {n})")
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"{path}:{lineno}: weight {w} outside [0, 1]")
        if i == j:
            self_loops += 1
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            duplicates += 1
        seen.add(key)
        k[i, j] = k[j, i] = w
    if duplicates or self_loops:
        log.warning("%s: %d duplicate edges, %d self-loops ignored", path, duplicates, self_loops)
    return EdgeList(as_symmetric(k), duplicates, self_loops)


def planted_partition(sizes, p_in: float, p_out: float, seed=None):
    """Binary planted-partition graph and its block labels.

    Every pair in the same block is joined with probability ``p_in``, pairs
    across blocks with ``p_out``.
    """
    sizes = [int(s) for s in sizes]
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = labels.shape[0]
    probs = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < probs, k=1)
    adj = (upper | upper.T).astype(np.float64)
    return as_symmetric(adj), labels
