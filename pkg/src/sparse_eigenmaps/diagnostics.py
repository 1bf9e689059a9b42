"""Empirical checks of the concentration and eigenspace perturbation bounds.

Notation follows the regularized pair ``Yhat = Y + r J`` and
``Khat = p K + r J``:

* degree concentration: ``max_i |D_Y(i) - D_K(i)| / D_K(i)``;
* squared-Laplacian deviation ``||L^2(Yhat) - L^2(Khat)||_F`` against the
  rate ``sqrt(log n) / (r sqrt(n))``;
* the Davis-Kahan inequality
  ``||X - X_ref O||_F^2 / 2 <= ||L^2(Yhat) - L^2(Khat)||_F^2 / gap^2``;
* the end-to-end eigenspace error against ``sqrt(log n) / (gap r sqrt(n))``.

Constants in these bounds are unspecified, so the functions report
empirical ratios instead of asserting thresholds.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .alignment import procrustes
from .corruption import NoiseSpec, corrupt
from .embedding import select_eigenspace
from .laplacian import RegularizedMatrix, normalized_laplacian, regularize, squared
from .matrixcore import eigh, frobenius_distance

DIAGNOSTIC_COLUMNS = (
    "n", "r", "p", "trial", "beta_hat", "frob_dev", "rate_bound", "ratio",
    "dk_lhs", "dk_rhs", "dk_holds", "dims_match",
)


def mix_seed(base_seed: int, *keys: int) -> int:
    """Derive a 63-bit seed from a base seed and integer keys.

    Uses ``numpy.random.SeedSequence`` hashing, so results do not depend on
    the order in which trials are executed.
    """
    ss = np.random.SeedSequence([int(base_seed), *(int(k) for k in keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def rate(n: int, r: float, gap: float = 1.0) -> float:
    """``sqrt(log n) / (gap r sqrt(n))``; infinite when ``r`` or ``gap`` is zero."""
    if r <= 0 or gap <= 0:
        return math.inf
    return math.sqrt(math.log(n)) / (gap * r * math.sqrt(n))


def degree_concentration(y_hat: RegularizedMatrix, k_hat: RegularizedMatrix) -> float:
    if y_hat.r != k_hat.r:
        raise ValueError(f"regularization differs: {y_hat.r} vs {k_hat.r}")
    if y_hat.n != k_hat.n:
        raise ValueError("matrices have different orders")
    ref = k_hat.degrees
    dev = np.abs(y_hat.degrees - ref)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(ref > 0, dev / ref, np.where(dev > 0, np.inf, 0.0))
    return float(rel.max())


def theorem3_deviation(y_hat: RegularizedMatrix, k_hat: RegularizedMatrix):
    """Return ``(frob_dev, rate_bound, ratio)`` for the squared Laplacians."""
    if not y_hat.r > 0 or not k_hat.r > 0:
        raise ValueError("the squared-Laplacian rate needs r > 0")
    if y_hat.r != k_hat.r:
        raise ValueError(f"regularization differs: {y_hat.r} vs {k_hat.r}")
    lsq_y = squared(normalized_laplacian(y_hat))
    lsq_k = squared(normalized_laplacian(k_hat))
    frob = frobenius_distance(lsq_y, lsq_k)
    bound = rate(y_hat.n, y_hat.r)
    return frob, bound, frob / bound


@dataclass(frozen=True)
class DavisKahanResult:
    dk_lhs: float
    dk_rhs: float
    holds: bool
    dims_match: bool
    k: int
    k_ref: int
    gap: float


def davis_kahan_check(lsq_y, lsq_k, interval, slack: float = 1e-9) -> DavisKahanResult:
    """Compare both sides of the Davis-Kahan bound for one interval.

    The gap is measured on the spectrum of ``lsq_k``. When the two
    selections have different dimensions the bound says nothing, so
    ``holds`` is vacuously true and ``dims_match`` is false.
    """
    sel_y = select_eigenspace(lsq_y, interval)
    sel_k = select_eigenspace(lsq_k, interval)
    frob = frobenius_distance(lsq_y, lsq_k)
    gap = sel_k.gap
    if gap == 0:
        rhs = math.inf if frob > 0 else 0.0
    else:
        rhs = frob**2 / gap**2
    if sel_y.k != sel_k.k:
        return DavisKahanResult(math.nan, rhs, True, False, sel_y.k, sel_k.k, gap)
    lhs = 0.5 * procrustes(sel_y.basis, sel_k.basis).residual ** 2
    # absolute floor only absorbs round-off when both sides are ~0
    holds = lhs <= rhs * (1.0 + slack) + 1e-20
    return DavisKahanResult(lhs, rhs, bool(holds), True, sel_y.k, sel_k.k, gap)


@dataclass(frozen=True)
class DiagnosticsReport:
    n: int
    r: float
    p: float
    trial: int
    beta_hat: float
    frob_dev: float
    rate_bound: float
    ratio: float
    dk_lhs: float
    dk_rhs: float
    dk_holds: bool
    dims_match: bool

    def row(self) -> dict:
        return asdict(self)


def diagnose(kernel, spec: NoiseSpec, r: float, interval, trial: int = 0,
             distances=None) -> DiagnosticsReport:
    """Run every diagnostic on one corrupted realization of ``kernel``.

    ``interval`` selects the eigenspace of the squared Laplacians.
    """
    observed = corrupt(kernel, spec, distances=distances)
    y_hat = regularize(observed.Y, r)
    k_hat = regularize(spec.p * np.asarray(kernel), r)
    beta_hat = degree_concentration(y_hat, k_hat)
    frob, bound, ratio = theorem3_deviation(y_hat, k_hat)
    dk = davis_kahan_check(
        squared(normalized_laplacian(y_hat)), squared(normalized_laplacian(k_hat)), interval
    )
    return DiagnosticsReport(
        observed.n, r, spec.p, trial, beta_hat, frob, bound, ratio,
        dk.dk_lhs, dk.dk_rhs, dk.holds, dk.dims_match,
    )


@dataclass
class EigenspaceErrorResult:
    """Per-trial eigenspace errors and the rate they are compared against.

    ``errors`` and ``ratios`` cover the kept trials only. ``c_hat`` is the
    95th percentile of ``error / rate``.
    """

    errors: np.ndarray
    rate: float
    gap: float
    ratios: np.ndarray
    excluded_gap: int
    excluded_dims: int
    hypothesis_violated: bool
    quantiles: dict

    @property
    def c_hat(self) -> float:
        return float(np.quantile(self.ratios, 0.95)) if self.ratios.size else math.nan


def theorem1_experiment(kernel, spec: NoiseSpec, r: float, interval, trials: int,
                        base_seed: int = 0, distances=None) -> EigenspaceErrorResult:
    """Distribution of the aligned eigenspace error over repeated corruptions.

    Eigenvectors of the unsquared Laplacians ``L(Y + rJ)`` and
    ``L(pK + rJ)`` with eigenvalues in ``interval`` are compared after
    Procrustes alignment. Trials whose selection dimensions differ are
    excluded and counted; a zero gap makes the rate undefined, so all
    trials are then excluded.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    n = kernel.shape[0]
    k_hat = regularize(spec.p * kernel, r)
    ref_spec = eigh(normalized_laplacian(k_hat))
    ref = select_eigenspace(ref_spec, interval)
    gap = ref.gap
    bound = rate(n, r, gap)
    violated = r < math.log(n) / n
    if gap == 0:
        empty = np.empty(0)
        return EigenspaceErrorResult(empty, bound, gap, empty, trials, 0, violated, {})
    errors = []
    excluded_dims = 0
    for t in range(trials):
        observed = corrupt(kernel, replace(spec, seed=mix_seed(base_seed, t)), distances=distances)
        sel = select_eigenspace(normalized_laplacian(regularize(observed.Y, r)), interval)
        if sel.k != ref.k:
            excluded_dims += 1
            continue
        errors.append(procrustes(sel.basis, ref.basis).residual)
    errors = np.asarray(errors)
    ratios = errors / bound if math.isfinite(bound) else np.zeros_like(errors)
    quantiles = {}
    if errors.size:
        quantiles = {q: float(np.quantile(errors, q)) for q in (0.05, 0.5, 0.95)}
    return EigenspaceErrorResult(errors, bound, gap, ratios, 0, excluded_dims, violated, quantiles)
