"""Universal singular value thresholding (USVT) for matrix completion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corruption import ObservedMatrix
from .matrixcore import as_symmetric, svd


@dataclass(frozen=True)
class UsvtConfig:
    eta: float = 0.02
    p_known: float | None = None
    clip_lo: float = 0.0
    clip_hi: float = 1.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.clip_lo < self.clip_hi:
            raise ValueError("clip_lo must be below clip_hi")


def usvt_complete(observed, cfg: UsvtConfig | None = None) -> np.ndarray:
    """Estimate the kernel from an occluded noisy observation.

    Singular values below ``(2 + eta) sqrt(n p)`` are discarded, the rest of
    the reconstruction is divided by ``p``, clipped, symmetrized and given a
    zero diagonal. Unobserved entries enter the SVD as zeros. ``p`` is
    ``cfg.p_known`` or the observed fraction of the mask.

    ``observed`` may be an :class:`ObservedMatrix` or a plain matrix, in
    which case nonzero off-diagonal entries count as observed.
    """
    cfg = cfg or UsvtConfig()
    if isinstance(observed, ObservedMatrix):
        y = observed.Y
        mask = observed.mask
    else:
        y = as_symmetric(observed)
        mask = y != 0
    n = y.shape[0]
    if n < 2:
        raise ValueError("USVT needs n >= 2")
    if cfg.p_known is not None:
        p_hat = cfg.p_known
    else:
        observed_upper = np.count_nonzero(np.triu(mask, k=1))
        if observed_upper == 0:
            raise ValueError("nothing observed and no p_known given")
        p_hat = observed_upper / (n * (n - 1) / 2)
    if not p_hat > 0:
        raise ValueError("observation probability must be positive")
    u, s, v = svd(y)
    keep = s >= (2.0 + cfg.eta) * np.sqrt(n * p_hat)
    est = (u[:, keep] * s[keep]) @ v[:, keep].T / p_hat
    est = np.clip(est, cfg.clip_lo, cfg.clip_hi)
    est = 0.5 * (est + est.T)
    np.fill_diagonal(est, 0.0)
    return as_symmetric(est)
