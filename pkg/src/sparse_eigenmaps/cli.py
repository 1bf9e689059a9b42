"""Command-line interface.

Every subcommand writes its main output to ``--output`` (stdout when
omitted). Failures print a single ``error: <Type>: <message>`` line to
stderr and exit with status 1; usage errors exit with status 2.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys

import numpy as np

from . import __version__
from .alignment import procrustes
from .baselines import UsvtConfig, usvt_complete
from .corruption import KINDS, NoiseSpec, corrupt
from .datasets import gaussian_kernel, load_kernel_csv, pairwise_distances, planted_partition, sample_swiss_roll
from .diagnostics import DIAGNOSTIC_COLUMNS, diagnose, mix_seed
from .embedding import default_interval, eigenmaps_embed
from .harness import SweepConfig, _csv, env_int, run_sweep, write_heatmap_pgm
from .laplacian import normalized_laplacian, regularize, squared
from .matrixcore import eigh, load_matrix_csv, save_matrix_csv


def _emit_matrix(args, m) -> None:
    if args.output:
        save_matrix_csv(args.output, m)
    else:
        buf = io.StringIO()
        for row in np.atleast_2d(m):
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        sys.stdout.write(buf.getvalue())


def _emit_text(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _seed(args, default: int = 0) -> int:
    if args.seed is not None:
        return args.seed
    return env_int("SR_SEED", default)


def _threads(args, default: int = 1) -> int:
    if args.threads is not None:
        return args.threads
    return env_int("SR_THREADS", default)


def _noise_spec(args, seed: int) -> NoiseSpec:
    return NoiseSpec(
        kind=args.kind, alpha=args.alpha, bias=args.bias, nu2=args.nu2,
        sigma=args.sigma, p=args.p, seed=seed,
    )


def cmd_generate(args) -> None:
    seed = _seed(args)
    if args.dataset == "swiss_roll":
        points = sample_swiss_roll(args.n, args.d_star, args.c, seed)
        dist = pairwise_distances(points)
        if args.distances_output:
            save_matrix_csv(args.distances_output, dist)
        if args.points_output:
            save_matrix_csv(args.points_output, points)
        kernel = gaussian_kernel(dist, args.sigma)
    else:
        sizes = [int(s) for s in args.sizes.split(",")]
        kernel, labels = planted_partition(sizes, args.p_in, args.p_out, seed)
        if args.labels_output:
            np.savetxt(args.labels_output, labels, fmt="%d")
    _emit_matrix(args, kernel)


def cmd_corrupt(args) -> None:
    kernel = load_kernel_csv(args.kernel)
    distances = load_matrix_csv(args.distances) if args.distances else None
    observed = corrupt(kernel, _noise_spec(args, _seed(args)), distances=distances)
    _emit_matrix(args, observed.Y)


def cmd_embed(args) -> None:
    kernel = load_kernel_csv(args.kernel)
    lap = normalized_laplacian(regularize(kernel, args.r))
    _emit_matrix(args, eigenmaps_embed(eigh(lap), args.d).coordinates)


def cmd_align(args) -> None:
    report = procrustes(load_matrix_csv(args.embedding), load_matrix_csv(args.reference))
    sys.stdout.write(f"rel_err,residual\n{report.rel_err!r},{report.residual!r}\n")
    if args.output:
        save_matrix_csv(args.output, report.rotation)


def cmd_diagnose(args) -> None:
    kernel = load_kernel_csv(args.kernel)
    distances = load_matrix_csv(args.distances) if args.distances else None
    base_seed = _seed(args)
    if not args.r > 0:
        raise ValueError("diagnose needs r > 0")
    lsq_k = squared(normalized_laplacian(regularize(args.p * kernel, args.r)))
    interval = default_interval(eigh(lsq_k).eigenvalues, args.d)
    rows = []
    for t in range(args.trials):
        spec = _noise_spec(args, mix_seed(base_seed, t))
        rows.append(diagnose(kernel, spec, args.r, interval, trial=t, distances=distances).row())
    summary = {"n": rows[0]["n"], "r": args.r, "p": args.p, "trial": "summary"}
    for col in ("beta_hat", "frob_dev", "rate_bound", "ratio", "dk_lhs", "dk_rhs"):
        vals = [row[col] for row in rows if not math.isnan(row[col])]
        summary[col] = float(np.mean(vals)) if vals else math.nan
    summary["dk_holds"] = all(row["dk_holds"] for row in rows)
    summary["dims_match"] = all(row["dims_match"] for row in rows)
    rows.append(summary)
    meta = {"interval": f"({interval[0]!r}, {interval[1]!r}) on L^2(pK + rJ)"}
    _emit_text(args, _csv(rows, DIAGNOSTIC_COLUMNS, meta))


def cmd_sweep(args) -> None:
    cfg = SweepConfig.from_file(args.config)
    if args.seed is not None or os.environ.get("SR_SEED"):
        cfg.base_seed = _seed(args, cfg.base_seed)
    result = run_sweep(cfg, threads=_threads(args))
    out = args.output or cfg.output_path
    if out:
        result.write(out)
    else:
        sys.stdout.write(result.to_csv())
    if args.heatmap_pgm:
        write_heatmap_pgm(args.heatmap_pgm, result)


def cmd_usvt(args) -> None:
    y = load_matrix_csv(args.observed)
    cfg = UsvtConfig(eta=args.eta, p_known=args.p_known)
    _emit_matrix(args, usvt_complete(y, cfg))


def _global_flags(parser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="base random seed (env SR_SEED)")
    parser.add_argument("--threads", type=int, default=default, help="worker threads (env SR_THREADS)")
    parser.add_argument("--output", "-o", default=default, help="output file (default stdout)")


def _noise_flags(parser) -> None:
    parser.add_argument("--kind", choices=KINDS, default="none")
    parser.add_argument("--alpha", type=float, default=None, help="beta fidelity")
    parser.add_argument("--bias", type=float, default=0.0)
    parser.add_argument("--nu2", type=float, default=0.0, help="distance noise variance")
    parser.add_argument("--sigma", type=float, default=0.2, help="kernel bandwidth for distance noise")
    parser.add_argument("--p", type=float, default=1.0, help="observation probability")
    parser.add_argument("--distances", help="distance matrix CSV (distance_gaussian noise)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-eigenmaps",
        description="Laplacian eigenmaps of sparse, noisy kernel matrices.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", parents=[common], help="write a kernel CSV for a synthetic dataset")
    p.add_argument("--dataset", choices=("swiss_roll", "planted_partition"), default="swiss_roll")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--d-star", type=int, default=6)
    p.add_argument("--c", type=float, default=5.0)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--sizes", default="50,50,50")
    p.add_argument("--p-in", type=float, default=0.5)
    p.add_argument("--p-out", type=float, default=0.05)
    p.add_argument("--distances-output")
    p.add_argument("--points-output")
    p.add_argument("--labels-output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("corrupt", parents=[common], help="apply noise and occlusion to a kernel CSV")
    p.add_argument("kernel")
    _noise_flags(p)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("embed", parents=[common], help="Laplacian eigenmaps embedding of a kernel CSV")
    p.add_argument("kernel")
    p.add_argument("--r", type=float, default=0.0, help="regularization added to every entry")
    p.add_argument("--d", type=int, default=2, help="embedding dimension")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("align", parents=[common], help="Procrustes-align an embedding to a reference")
    p.add_argument("embedding")
    p.add_argument("reference")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("diagnose", parents=[common], help="concentration and Davis-Kahan diagnostics")
    p.add_argument("kernel")
    _noise_flags(p)
    p.add_argument("--r", type=float, default=0.05)
    p.add_argument("--d", type=int, default=2, help="selection window holds the top d + 1 eigenvalues")
    p.add_argument("--trials", type=int, default=10)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("sweep", parents=[common], help="run a sweep config and write results CSV")
    p.add_argument("config")
    p.add_argument("--heatmap-pgm", help="also write a grayscale PGM of the cell means")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("usvt", parents=[common], help="complete an observed matrix by USVT")
    p.add_argument("observed")
    p.add_argument("--eta", type=float, default=0.02)
    p.add_argument("--p-known", type=float, default=None)
    p.set_defaults(func=cmd_usvt)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - one-line error contract
        msg = " ".join(str(exc).split())
        sys.stderr.write(f"error: {type(exc).__name__}: {msg}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
