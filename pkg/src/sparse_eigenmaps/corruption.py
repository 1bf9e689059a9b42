"""Observation model: entrywise noise on a kernel followed by random occlusion.

Every routine works on the strict upper triangle and mirrors the result, so
outputs are symmetric and hollow by construction.

Random streams: noise draws come from ``SeedSequence([seed, NOISE_STREAM])``
and occlusion draws from ``SeedSequence([seed, MASK_STREAM])``. Occlusion
always consumes one uniform per upper-triangle entry and keeps the entry
when the uniform is below ``p``, so for a fixed seed the observed set grows
monotonically with ``p`` and the noise realization does not depend on ``p``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .matrixcore import as_symmetric

NOISE_STREAM = 0
MASK_STREAM = 0x6D61736B

ALPHA_INF = 1e12
ALPHA_ZERO = 1e-12

KINDS = ("none", "beta", "beta_biased", "distance_gaussian")


def _rng(seed, stream: int) -> np.random.Generator:
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream]))


def _from_upper(n: int, values: np.ndarray) -> np.ndarray:
    out = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    out[iu] = values
    out.T[iu] = values
    return out


@dataclass(frozen=True)
class NoiseSpec:
    """Noise kind, its parameters, observation probability and seed.

    ``alpha`` is the beta fidelity (larger means less noise), ``bias`` the
    shift of the beta mean, ``nu2`` the variance of the Gaussian error added
    to distances and ``sigma`` the kernel bandwidth used to re-kernelize
    them.
    """

    kind: str = "none"
    alpha: float | None = None
    bias: float = 0.0
    nu2: float = 0.0
    sigma: float | None = None
    p: float = 1.0
    seed: int | None = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("beta", "beta_biased"):
            if self.alpha is None or not self.alpha > 0:
                raise ValueError("beta noise needs alpha > 0")
        if self.kind == "distance_gaussian":
            if not self.nu2 >= 0:
                raise ValueError("nu2 must be nonnegative")
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("distance noise needs a positive kernel bandwidth sigma")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"observation probability p={self.p} outside [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseSpec":
        known = {k: d[k] for k in ("kind", "alpha", "bias", "nu2", "sigma", "p", "seed") if k in d}
        return cls(**known)


@dataclass(frozen=True)
class ObservedMatrix:
    """Sparse noisy realization ``Y`` with its generating spec.

    ``mask`` is a symmetric boolean matrix with a false diagonal; ``Y`` is
    zero wherever ``mask`` is false.
    """

    Y: np.ndarray
    spec: NoiseSpec
    mask: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.Y.shape[0]

    @property
    def observed_fraction(self) -> float:
        n = self.n
        if n < 2:
            return 0.0
        return float(np.count_nonzero(np.triu(self.mask, k=1))) / (n * (n - 1) / 2)


def _beta_with_mean(mean: np.ndarray, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Draw entries with the given means using Beta(alpha, alpha (1 - m) / m).

    Means of exactly 0 or 1 are returned as is; the two alpha limits are
    short-circuited to the deterministic and Bernoulli cases.
    """
    out = mean.copy()
    if alpha >= ALPHA_INF:
        return out
    inner = (mean > 0.0) & (mean < 1.0)
    m = mean[inner]
    if alpha <= ALPHA_ZERO:
        out[inner] = (rng.random(m.shape[0]) < m).astype(np.float64)
        return out
    # means below ~1e-308 overflow the second shape to inf; Beta(a, inf) is 0
    with np.errstate(over="ignore"):
        out[inner] = rng.beta(alpha, alpha * (1.0 - m) / m)
    return out


def beta_noise_biased(kernel, alpha: float, b: float = 0.0, seed=None) -> np.ndarray:
    """Beta noise with mean ``clip(K + b, 0, 1)`` on every off-diagonal entry."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    k = np.asarray(kernel, dtype=np.float64)
    n = k.shape[0]
    iu = np.triu_indices(n, k=1)
    mean = np.clip(k[iu] + b, 0.0, 1.0)
    values = _beta_with_mean(mean, alpha, _rng(seed, NOISE_STREAM))
    return as_symmetric(_from_upper(n, values))


def beta_noise(kernel, alpha: float, seed=None) -> np.ndarray:
    """Unbiased beta noise: each entry has mean ``K_ij`` and variance
    ``K_ij^2 (1 - K_ij) / (alpha + K_ij)``."""
    return beta_noise_biased(kernel, alpha, 0.0, seed)


def distance_noise_kernel(distances, sigma: float, nu2: float, seed=None) -> np.ndarray:
    """Gaussian kernel of distances perturbed by ``N(0, nu2)`` errors."""
    if not sigma > 0:
        raise ValueError("kernel bandwidth sigma must be positive")
    if not nu2 >= 0:
        raise ValueError("nu2 must be nonnegative")
    d = np.asarray(distances, dtype=np.float64)
    n = d.shape[0]
    iu = np.triu_indices(n, k=1)
    noisy = d[iu]
    if nu2 > 0:
        noisy = noisy + _rng(seed, NOISE_STREAM).normal(0.0, np.sqrt(nu2), size=noisy.shape[0])
    return as_symmetric(_from_upper(n, np.exp(-(noisy**2) / sigma**2)))


def occlude(kernel, p: float, seed=None, spec: NoiseSpec | None = None) -> ObservedMatrix:
    """Keep each upper-triangle entry independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"observation probability p={p} outside [0, 1]")
    k = np.asarray(kernel, dtype=np.float64)
    n = k.shape[0]
    iu = np.triu_indices(n, k=1)
    keep = _rng(seed, MASK_STREAM).random(iu[0].shape[0]) < p
    mask = np.zeros((n, n), dtype=bool)
    mask[iu] = keep
    mask |= mask.T
    y = np.where(mask, k, 0.0)
    mask.setflags(write=False)
    if spec is None:
        spec = NoiseSpec(kind="none", p=p, seed=seed)
    return ObservedMatrix(as_symmetric(y), spec, mask)


def corrupt(kernel, spec: NoiseSpec, distances=None) -> ObservedMatrix:
    """Apply ``spec``'s noise to ``kernel`` and then occlude with ``spec.p``.

    ``distances`` is required for ``distance_gaussian`` noise, which perturbs
    the distances behind the kernel rather than the kernel itself.
    """
    if spec.kind == "none":
        noisy = kernel
    elif spec.kind == "beta":
        noisy = beta_noise(kernel, spec.alpha, spec.seed)
    elif spec.kind == "beta_biased":
        noisy = beta_noise_biased(kernel, spec.alpha, spec.bias, spec.seed)
    else:
        if distances is None:
            raise ValueError("distance_gaussian noise needs the distance matrix")
        noisy = distance_noise_kernel(distances, spec.sigma, spec.nu2, spec.seed)
    return occlude(noisy, spec.p, spec.seed, spec=spec)
