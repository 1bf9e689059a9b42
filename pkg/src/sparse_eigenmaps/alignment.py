"""Orthogonal Procrustes alignment and the relative embedding error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrixcore import svd


@dataclass(frozen=True)
class AlignmentReport:
    """Best orthogonal ``rotation`` mapping ``X_ref`` onto ``X``.

    ``residual = ||X - X_ref @ rotation||_F`` and ``rel_err`` divides it by
    ``||X_ref||_F``.
    """

    rotation: np.ndarray
    residual: float
    rel_err: float


def procrustes(x, x_ref) -> AlignmentReport:
    """Solve ``min_O ||x - x_ref O||_F`` over orthogonal ``O``, reflections included.

    With ``x_ref.T @ x = U S V^T`` the minimizer is ``O = U V^T``. Empty
    bases (zero columns) align trivially with zero error.
    """
    x = np.asarray(x, dtype=np.float64)
    x_ref = np.asarray(x_ref, dtype=np.float64)
    if x.ndim != 2 or x.shape != x_ref.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {x_ref.shape}")
    d = x.shape[1]
    if d == 0:
        return AlignmentReport(np.zeros((0, 0)), 0.0, 0.0)
    if np.array_equal(x, x_ref):
        # the optimum is exactly the identity; skip SVD round-off
        rotation = np.eye(d)
    else:
        u, _, v = svd(x_ref.T @ x)
        rotation = u @ v.T
    residual = float(np.linalg.norm(x - x_ref @ rotation))
    ref_norm = float(np.linalg.norm(x_ref))
    rel_err = residual / ref_norm if ref_norm > 0 else (0.0 if residual == 0 else float("inf"))
    return AlignmentReport(rotation, residual, rel_err)


def subspace_distance(x, x_ref) -> float:
    return procrustes(x, x_ref).rel_err
