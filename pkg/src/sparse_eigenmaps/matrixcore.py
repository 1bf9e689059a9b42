"""Dense symmetric matrix helpers: validation, eigendecomposition, SVD, CSV I/O.

Symmetric matrices are plain ``float64`` ndarrays that have passed through
:func:`as_symmetric`; the returned arrays are read-only so a validated
matrix cannot drift out of symmetry afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Spectrum",
    "as_symmetric",
    "eigh",
    "svd",
    "frobenius_distance",
    "fix_signs",
    "load_matrix_csv",
    "save_matrix_csv",
]


def _check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")


def as_symmetric(a, atol: float = 1e-9) -> np.ndarray:
    """Validate ``a`` as a real symmetric matrix and return a read-only copy.

    The copy is exactly symmetric: the upper triangle is mirrored into the
    lower one after checking that the two agree within ``atol``.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    _check_finite(a)
    if not np.allclose(a, a.T, rtol=0.0, atol=atol):
        raise ValueError("matrix is not symmetric")
    iu = np.triu_indices(a.shape[0], k=1)
    a.T[iu] = a[iu]
    a.setflags(write=False)
    return a


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the entry of largest magnitude is nonnegative.

    Ties on magnitude go to the lowest row index (``argmax`` semantics).
    """
    if vectors.size == 0:
        return vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[rows, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)
    return vectors * signs


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs of a symmetric matrix, eigenvalues sorted nonincreasing.

    Column ``j`` of ``eigenvectors`` pairs with ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


def _order_ties(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Permutation sorting by decreasing value, exact ties by decreasing column."""
    order = np.argsort(-values, kind="stable")
    values = values[order]
    start = 0
    n = values.shape[0]
    while start < n:
        stop = start + 1
        while stop < n and values[stop] == values[start]:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            keyed = sorted(block, key=lambda j: tuple(vectors[:, j]), reverse=True)
            order[start:stop] = keyed
        start = stop
    return order


def eigh(a) -> Spectrum:
    """Eigendecomposition of a symmetric matrix.

    Eigenvalues come back nonincreasing. Each eigenvector is sign-fixed so
    that its largest-magnitude entry is nonnegative, which makes the output
    a deterministic function of ``a``.

    Raises
    ------
    ValueError
        If ``a`` is not square and symmetric or has non-finite entries.
    """
    a = as_symmetric(a)
    values, vectors = np.linalg.eigh(a)
    vectors = fix_signs(vectors)
    order = _order_ties(values, vectors)
    values = np.ascontiguousarray(values[order])
    vectors = np.ascontiguousarray(vectors[:, order])
    values.setflags(write=False)
    vectors.setflags(write=False)
    return Spectrum(values, vectors)


def svd(m):
    """Thin SVD ``m = U @ diag(s) @ V.T`` with ``s`` nonincreasing.

    Returns ``(U, s, V)``; note ``V`` rather than ``V.T``.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got {m.ndim} dimensions")
    _check_finite(m)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    return u, s, vt.T


def frobenius_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def save_matrix_csv(path, m) -> None:
    """Write a dense matrix as headerless CSV, shortest round-trip floats."""
    m = np.atleast_2d(np.asarray(m, dtype=np.float64))
    lines = [",".join(repr(float(v)) for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix_csv(path) -> np.ndarray:
    m = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    _check_finite(m)
    return m
