"""Degree-normalized graph Laplacian ``D^{-1/2} A D^{-1/2}`` and regularization.

This is the adjacency-side normalization, not ``I - D^{-1/2} A D^{-1/2}``:
the two share eigenvectors, but here the informative eigenvalues are the
largest ones. Vertices of zero degree get zero rows and columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrixcore import as_symmetric


@dataclass(frozen=True)
class RegularizedMatrix:
    """``A + r J`` (all-ones ``J``, diagonal included) with its degrees.

    ``degrees[i] = n r + sum_j A[i, j]``, so every degree is at least ``n r``.
    """

    base: np.ndarray
    r: float
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.base.shape[0]


def regularize(a, r: float) -> RegularizedMatrix:
    if not r >= 0:
        raise ValueError(f"regularization r={r} must be nonnegative")
    a = as_symmetric(a)
    base = as_symmetric(a + r) if r > 0 else a
    degrees = base.sum(axis=1)
    degrees.setflags(write=False)
    return RegularizedMatrix(base, float(r), degrees)


def _as_matrix(a) -> np.ndarray:
    if isinstance(a, RegularizedMatrix):
        return a.base
    return as_symmetric(a)


def normalized_laplacian(a) -> np.ndarray:
    """``D^{-1/2} A D^{-1/2}`` with the pseudo-inverse convention for zero degrees.

    Accepts a symmetric matrix or a :class:`RegularizedMatrix`.

    Raises
    ------
    ValueError
        If any row sum is negative.
    """
    a = _as_matrix(a)
    deg = a.sum(axis=1)
    if np.any(deg < 0):
        raise ValueError("normalized Laplacian needs nonnegative row sums")
    inv_sqrt = np.zeros_like(deg)
    pos = deg > 0
    inv_sqrt[pos] = 1.0 / np.sqrt(deg[pos])
    lap = inv_sqrt[:, None] * a * inv_sqrt[None, :]
    return as_symmetric(lap)


def squared(lap) -> np.ndarray:
    lap = as_symmetric(lap)
    return as_symmetric(lap @ lap)
