"""Seeded parameter sweeps over noise, occlusion, regularization and dimension.

Config files are INI with a single ``[sweep]`` section. Grid keys take
comma-separated lists::

    [sweep]
    dataset = swiss_roll        # swiss_roll | kernel_csv | edge_list | planted_partition
    n = 500
    d_star = 3
    c = 5
    sigma = 0.2
    kind = beta                 # none | beta | beta_biased | distance_gaussian
    alpha = 0.01, 1, 1e12
    bias = 0
    nu2 = 0
    p_grid = 0.1, 0.5, 1.0
    r_grid = 0
    d_grid = 3
    trials = 20
    base_seed = 0
    metric = rel_err            # rel_err | ari | ap
    completion = none           # none | usvt
    output_path = results.csv

``kernel_csv`` and ``edge_list`` datasets read ``path`` (plus ``n`` for edge
lists); ``planted_partition`` uses ``sizes``, ``p_in`` and ``p_out``. The
``ari`` and ``ap`` metrics read labels from ``labels_path`` (one integer
per line) unless the dataset provides them; ``ari`` clusters with ``k``
means (default 3).

Seeding: trial ``t`` of every cell with noise kind ``kind`` uses noise seed
``mix_seed(base_seed, KINDS.index(kind), t)``. Cells that differ only in
``alpha``, ``bias``, ``nu2``, ``p``, ``r`` or ``d`` therefore share random
streams (common random numbers), and adding or removing grid values never
changes the realizations in other cells.
"""

from __future__ import annotations

import configparser
import io
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .alignment import subspace_distance
from .baselines import UsvtConfig, usvt_complete
from .corruption import KINDS, NoiseSpec, corrupt
from .datasets import (
    gaussian_kernel,
    load_edge_list,
    load_kernel_csv,
    pairwise_distances,
    planted_partition,
    sample_swiss_roll,
)
from .diagnostics import mix_seed
from .embedding import eigenmaps_embed
from .evaluation import adjusted_rand_index, average_precision, kmeans
from .laplacian import normalized_laplacian, regularize
from .matrixcore import eigh

RESULT_COLUMNS = ("dataset", "kind", "alpha", "bias", "nu2", "p", "r", "d",
                  "trial", "metric", "value", "flag")
SUMMARY_COLUMNS = ("dataset", "kind", "alpha", "bias", "nu2", "p", "r", "d",
                   "metric", "mean", "se", "count", "excluded")
METRICS = ("rel_err", "ari", "ap")
NORMALIZATION_NOTE = "rel_err = min_O ||X - X_ref O||_F / ||X_ref||_F, O orthogonal"


def _floats(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _ints(text) -> list:
    return [int(v) for v in _floats(text)]


@dataclass
class SweepConfig:
    dataset: str = "swiss_roll"
    n: int = 500
    d_star: int = 3
    c: float = 5.0
    sigma: float = 0.2
    path: str | None = None
    sizes: list = field(default_factory=lambda: [50, 50, 50])
    p_in: float = 0.5
    p_out: float = 0.05
    dataset_seed: int | None = None
    noise: list = field(default_factory=lambda: [NoiseSpec()])
    p_grid: list = field(default_factory=lambda: [1.0])
    r_grid: list = field(default_factory=lambda: [0.0])
    d_grid: list = field(default_factory=lambda: [2])
    trials: int = 1
    base_seed: int = 0
    metric: str = "rel_err"
    k: int = 3
    labels_path: str | None = None
    completion: str = "none"
    output_path: str | None = None

    def __post_init__(self):
        for name in ("noise", "p_grid", "r_grid", "d_grid"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        if self.completion not in ("none", "usvt"):
            raise ValueError(f"unknown completion {self.completion!r}")
        for p in self.p_grid:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p={p} outside [0, 1]")
        for r in self.r_grid:
            if r < 0:
                raise ValueError(f"r={r} is negative")

    @classmethod
    def from_file(cls, path) -> "SweepConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        with open(path) as fh:
            parser.read_file(fh)
        if "sweep" not in parser:
            raise ValueError(f"{path}: missing [sweep] section")
        cfg = cls.from_mapping(dict(parser["sweep"]))
        # relative paths in a config resolve against the config's directory
        base = Path(path).parent
        for name in ("path", "labels_path"):
            value = getattr(cfg, name)
            if value and not Path(value).is_absolute():
                setattr(cfg, name, str(base / value))
        return cfg

    @classmethod
    def from_mapping(cls, m: dict) -> "SweepConfig":
        m = {k: v for k, v in m.items() if str(v).strip() != ""}
        kw = {}
        for name in ("dataset", "path", "metric", "labels_path", "completion", "output_path"):
            if name in m:
                kw[name] = str(m[name]).strip()
        for name in ("n", "d_star", "trials", "base_seed", "k", "dataset_seed"):
            if name in m:
                kw[name] = int(float(m[name]))
        for name in ("c", "sigma", "p_in", "p_out"):
            if name in m:
                kw[name] = float(m[name])
        if "sizes" in m:
            kw["sizes"] = _ints(m["sizes"])
        for name in ("p_grid", "r_grid"):
            if name in m:
                kw[name] = _floats(m[name])
        if "d_grid" in m:
            kw["d_grid"] = _ints(m["d_grid"])
        kw["noise"] = noise_templates(
            m.get("kind", "none"),
            m.get("alpha", ""),
            m.get("bias", "0"),
            m.get("nu2", "0"),
            float(m.get("sigma", 0.2)),
        )
        return cls(**kw)


def noise_templates(kind: str, alpha="", bias="0", nu2="0", sigma: float = 0.2) -> list:
    """Expand the grid keys for one noise kind into ``NoiseSpec`` templates."""
    kind = kind.strip()
    if kind == "none":
        return [NoiseSpec("none")]
    if kind == "beta":
        return [NoiseSpec("beta", alpha=a) for a in _floats(alpha)]
    if kind == "beta_biased":
        return [NoiseSpec("beta_biased", alpha=a, bias=b)
                for a, b in itertools.product(_floats(alpha), _floats(bias))]
    if kind == "distance_gaussian":
        return [NoiseSpec("distance_gaussian", nu2=v, sigma=sigma) for v in _floats(nu2)]
    raise ValueError(f"unknown noise kind {kind!r}")


@dataclass(frozen=True)
class Dataset:
    name: str
    kernel: np.ndarray
    distances: np.ndarray | None = None
    labels: np.ndarray | None = None


def load_labels(path) -> np.ndarray:
    return np.loadtxt(path, dtype=np.int64, ndmin=1)


def load_dataset(cfg: SweepConfig) -> Dataset:
    seed = cfg.base_seed if cfg.dataset_seed is None else cfg.dataset_seed
    labels = None
    if cfg.dataset == "swiss_roll":
        points = sample_swiss_roll(cfg.n, cfg.d_star, cfg.c, seed)
        dist = pairwise_distances(points)
        ds = Dataset("swiss_roll", gaussian_kernel(dist, cfg.sigma), dist)
    elif cfg.dataset == "kernel_csv":
        ds = Dataset("kernel_csv", load_kernel_csv(_need_path(cfg)))
    elif cfg.dataset == "edge_list":
        ds = Dataset("edge_list", load_edge_list(_need_path(cfg), cfg.n).kernel)
    elif cfg.dataset == "planted_partition":
        adj, labels = planted_partition(cfg.sizes, cfg.p_in, cfg.p_out, seed)
        ds = Dataset("planted_partition", adj, labels=labels)
    else:
        raise ValueError(f"unknown dataset {cfg.dataset!r}")
    if cfg.labels_path:
        labels = load_labels(cfg.labels_path)
    if labels is not None:
        if labels.shape[0] != ds.kernel.shape[0]:
            raise ValueError(
                f"{labels.shape[0]} labels for a {ds.kernel.shape[0]}-vertex dataset"
            )
        ds = replace(ds, labels=labels)
    if cfg.metric in ("ari", "ap") and ds.labels is None:
        raise ValueError(f"metric {cfg.metric!r} needs labels")
    for spec in cfg.noise:
        if spec.kind == "distance_gaussian" and ds.distances is None:
            raise ValueError("distance_gaussian noise needs a point-cloud dataset")
    return ds


def _need_path(cfg: SweepConfig) -> str:
    if not cfg.path:
        raise ValueError(f"dataset {cfg.dataset!r} needs a path")
    if not Path(cfg.path).exists():
        raise FileNotFoundError(cfg.path)
    return cfg.path


@dataclass
class SweepResult:
    rows: list
    summary: list
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        return _csv(self.rows, RESULT_COLUMNS, self.metadata)

    def summary_csv(self) -> str:
        return _csv(self.summary, SUMMARY_COLUMNS, self.metadata)

    def write(self, path) -> None:
        path = Path(path)
        path.write_text(self.to_csv())
        path.with_name(path.stem + ".summary" + path.suffix).write_text(self.summary_csv())


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _csv(rows, columns, metadata) -> str:
    out = io.StringIO()
    for key in sorted(metadata):
        out.write(f"# {key}: {metadata[key]}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(fmt(row[c]) for c in columns) + "\n")
    return out.getvalue()


class _Pipeline:
    """Shared, read-only state for one sweep: dataset and clean references."""

    def __init__(self, cfg: SweepConfig, ds: Dataset):
        self.cfg = cfg
        self.ds = ds
        self.refs = {}
        if cfg.metric == "rel_err":
            d_max = max(cfg.d_grid)
            rs = set(cfg.r_grid) | {0.0}
            for r in sorted(rs):
                lap = normalized_laplacian(regularize(ds.kernel, r))
                self.refs[r] = eigenmaps_embed(eigh(lap), d_max).coordinates

    def run(self, task) -> list:
        t_idx, spec, p, trial = task
        cfg, ds = self.cfg, self.ds
        seed = mix_seed(cfg.base_seed, KINDS.index(spec.kind), trial)
        observed = corrupt(ds.kernel, replace(spec, p=p, seed=seed), distances=ds.distances)
        y = observed.Y
        if cfg.completion == "usvt":
            y = usvt_complete(observed, UsvtConfig())
        rows = []
        for r in cfg.r_grid:
            spectrum = eigh(normalized_laplacian(regularize(y, r)))
            for d in cfg.d_grid:
                emb = eigenmaps_embed(spectrum, d).coordinates
                for metric, value, flag in self._metrics(emb, r, d, seed):
                    rows.append({
                        "_order": (t_idx, p, r, d, trial, metric),
                        "dataset": ds.name, "kind": spec.kind,
                        "alpha": spec.alpha if spec.kind in ("beta", "beta_biased") else None,
                        "bias": spec.bias if spec.kind == "beta_biased" else None,
                        "nu2": spec.nu2 if spec.kind == "distance_gaussian" else None,
                        "p": p, "r": r, "d": d, "trial": trial,
                        "metric": metric, "value": value, "flag": flag,
                    })
        return rows

    def _metrics(self, emb, r, d, seed):
        cfg = self.cfg
        suffix = "/usvt" if cfg.completion == "usvt" else ""
        if cfg.metric == "rel_err":
            yield "rel_err" + suffix, subspace_distance(emb, self.refs[r][:, :d]), ""
            if r > 0:
                yield "rel_err_clean_r0" + suffix, subspace_distance(emb, self.refs[0.0][:, :d]), ""
        elif cfg.metric == "ari":
            res = kmeans(emb, cfg.k, seed=seed, return_result=True)
            flag = "" if res.converged else "kmeans-max-iter"
            yield "ari" + suffix, adjusted_rand_index(res.labels, self.ds.labels), flag
        else:
            yield "ap" + suffix, average_precision(emb, self.ds.labels), ""


def _summarize(rows) -> list:
    groups = {}
    for row in rows:
        key = row["_order"][:4] + (row["_order"][5],)
        groups.setdefault(key, []).append(row)
    summary = []
    for key in sorted(groups, key=_sort_key):
        members = groups[key]
        kept = [m["value"] for m in members if not m["flag"].startswith("excluded")]
        vals = np.asarray(kept, dtype=np.float64)
        mean = float(np.mean(vals)) if vals.size else math.nan
        se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else math.nan
        first = members[0]
        summary.append({
            **{c: first[c] for c in ("dataset", "kind", "alpha", "bias", "nu2", "p", "r", "d", "metric")},
            "mean": mean, "se": se, "count": int(vals.size),
            "excluded": len(members) - int(vals.size),
        })
    return summary


def _sort_key(key):
    return tuple(str(k) if isinstance(k, str) else k for k in key)


def run_sweep(cfg: SweepConfig, threads: int = 1, order_seed: int | None = None) -> SweepResult:
    """Execute every (noise template, p, trial) task and collect metric rows.

    Each task corrupts the dataset once and evaluates all ``r`` and ``d``
    values on that realization. Results are sorted canonically, so neither
    ``threads`` nor the task execution order (shuffled when ``order_seed``
    is given) changes the output.
    """
    ds = load_dataset(cfg)
    pipeline = _Pipeline(cfg, ds)
    tasks = [
        (t_idx, spec, p, trial)
        for t_idx, spec in enumerate(cfg.noise)
        for p in cfg.p_grid
        for trial in range(cfg.trials)
    ]
    if order_seed is not None:
        np.random.default_rng(order_seed).shuffle(tasks)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(pipeline.run, tasks))
    else:
        chunks = [pipeline.run(t) for t in tasks]
    rows = sorted(itertools.chain.from_iterable(chunks), key=lambda r: _sort_key(r["_order"]))
    metadata = {
        "dataset": ds.name,
        "n": ds.kernel.shape[0],
        "base_seed": cfg.base_seed,
        "trials": cfg.trials,
        "completion": cfg.completion,
    }
    if cfg.metric == "rel_err":
        metadata["normalization"] = NORMALIZATION_NOTE
        metadata["reference"] = "rel_err: L(K + rJ), same r; rel_err_clean_r0: L(K)"
    if cfg.metric == "ap":
        metadata["ap_protocol"] = "pairwise retrieval AP, pairs ranked by Euclidean distance"
    return SweepResult(rows, _summarize(rows), metadata)


def run_regularization_sweep(cfg: SweepConfig, threads: int = 1) -> SweepResult:
    """ARI of k-means on the embedding for every (r, d, p, trial)."""
    if cfg.metric != "ari":
        raise ValueError("regularization sweeps report the ari metric")
    return run_sweep(cfg, threads=threads)


def cell_means(result: SweepResult, metric: str | None = None) -> dict:
    """Map ``(kind, alpha, bias, nu2, p, r, d)`` to the summary mean."""
    out = {}
    for row in result.summary:
        if metric is None or row["metric"] == metric:
            key = (row["kind"], row["alpha"], row["bias"], row["nu2"], row["p"], row["r"], row["d"])
            out[key] = (row["mean"], row["se"])
    return out


def write_heatmap_pgm(path, result: SweepResult, metric: str | None = None) -> None:
    """Grayscale P2 image of cell means: one row per noise template, one column per p.

    Uses the first ``r``, ``d`` and metric present. Values are min-max
    scaled to 0-255 (all zero when the means are constant).
    """
    rows = result.summary
    if not rows:
        raise ValueError("empty sweep result")
    metric = metric or rows[0]["metric"]
    r0, d0 = rows[0]["r"], rows[0]["d"]
    sel = [s for s in rows if s["metric"] == metric and s["r"] == r0 and s["d"] == d0]
    templates = list(dict.fromkeys((s["kind"], s["alpha"], s["bias"], s["nu2"]) for s in sel))
    ps = sorted({s["p"] for s in sel})
    grid = np.full((len(templates), len(ps)), np.nan)
    for s in sel:
        grid[templates.index((s["kind"], s["alpha"], s["bias"], s["nu2"])), ps.index(s["p"])] = s["mean"]
    finite = grid[np.isfinite(grid)]
    lo, hi = (finite.min(), finite.max()) if finite.size else (0.0, 0.0)
    scaled = np.zeros(grid.shape, dtype=np.int64)
    if hi > lo:
        scaled = np.rint(255 * (np.nan_to_num(grid, nan=lo) - lo) / (hi - lo)).astype(np.int64)
    lines = ["P2", f"{len(ps)} {len(templates)}", "255"]
    lines += [" ".join(str(v) for v in row) for row in scaled]
    Path(path).write_text("\n".join(lines) + "\n")


def env_int(name: str, default):
    value = os.environ.get(name)
    return int(value) if value not in (None, "") else default
