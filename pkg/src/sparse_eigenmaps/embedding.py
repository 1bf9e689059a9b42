"""Laplacian eigenmaps coordinates and eigenvalue-interval eigenspaces."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrixcore import Spectrum, eigh


@dataclass(frozen=True)
class Embedding:
    """``d`` nontrivial eigenvectors of a normalized Laplacian as coordinates."""

    coordinates: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return self.coordinates.shape[0]

    @property
    def d(self) -> int:
        return self.coordinates.shape[1]


@dataclass(frozen=True)
class EigenSelection:
    """Eigenvectors whose eigenvalues fall strictly inside ``interval``.

    ``gap`` is the distance from the eigenvalues outside the interval to the
    interval itself; ``math.inf`` when every eigenvalue is inside.
    """

    interval: tuple
    basis: np.ndarray
    eigenvalues_inside: np.ndarray
    gap: float

    @property
    def k(self) -> int:
        return self.basis.shape[1]


def _spectrum(lap) -> Spectrum:
    return lap if isinstance(lap, Spectrum) else eigh(lap)


def eigenmaps_embed(lap, d: int) -> Embedding:
    """Drop the top eigenvector and keep the next ``d`` as coordinates.

    ``lap`` may be a Laplacian matrix or its precomputed :class:`Spectrum`.
    The top eigenvector is dropped by rank; for non-regular graphs it is
    proportional to ``D^{1/2} 1`` rather than constant.
    """
    spec = _spectrum(lap)
    n = spec.n
    if not 1 <= d <= n - 1:
        raise ValueError(f"embedding dimension d={d} outside [1, {n - 1}]")
    return Embedding(spec.eigenvectors[:, 1 : d + 1], spec.eigenvalues[1 : d + 1])


def _check_interval(interval) -> tuple:
    lo, hi = (float(v) for v in interval)
    if not lo < hi:
        raise ValueError(f"interval ({lo}, {hi}) is empty")
    return lo, hi


def eigengap(eigenvalues, interval) -> float:
    """Smallest distance from an eigenvalue outside the open interval to the interval."""
    lo, hi = _check_interval(interval)
    ev = np.asarray(eigenvalues, dtype=np.float64)
    outside = ev[~((ev > lo) & (ev < hi))]
    if outside.size == 0:
        return math.inf
    return float(np.min(np.maximum(np.maximum(lo - outside, outside - hi), 0.0)))


def select_eigenspace(lap, interval) -> EigenSelection:
    lo, hi = _check_interval(interval)
    spec = _spectrum(lap)
    inside = (spec.eigenvalues > lo) & (spec.eigenvalues < hi)
    return EigenSelection(
        (lo, hi),
        spec.eigenvectors[:, inside],
        spec.eigenvalues[inside],
        eigengap(spec.eigenvalues, (lo, hi)),
    )


def default_interval(eigenvalues, d: int, upper: float | None = None) -> tuple:
    """Interval holding the top ``d + 1`` eigenvalues.

    The lower end sits midway between the ``(d+1)``-th and ``(d+2)``-th
    eigenvalue; the upper end is ``upper`` or one unit above the largest.
    This is a convention for choosing the selection window, nothing more.
    """
    ev = np.sort(np.asarray(eigenvalues, dtype=np.float64))[::-1]
    if not 0 <= d <= ev.shape[0] - 2:
        raise ValueError(f"need at least d + 2 = {d + 2} eigenvalues")
    lo = 0.5 * (ev[d] + ev[d + 1])
    hi = upper if upper is not None else ev[0] + 1.0
    return (float(lo), float(hi))
