"""Benchmark command line: gen, sketch, eval, sweep.

Exit codes: 0 success, 2 bad arguments, 3 file problems, 4 numerical failure.
All randomness flows from --seed, so identical invocations write identical
data files; --deterministic additionally zeroes wall-clock fields.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import data_io, metrics
from .bki import KIND_COUNTSKETCH, KIND_GAUSSIAN, RbkiConfig
from .driver import InMemorySource, RbkifdConfig, run_stream
from .errors import ArgumentError, NumericalError, ParseError
from .fd import FdSketch
from .matrix import DenseMatrix, SparseMatrix
from .random_blocks import SEED_MASK
from .svgplot import write_line_chart

METHOD_FD = "fd"
METHOD_GA = "ga-bkifd"
METHOD_CS = "cs-bkifd"
METHODS = (METHOD_FD, METHOD_GA, METHOD_CS)

ROWS_HEADER = "method,ell,trial,cov_err,proj_err,wall_s,nnz_ops"
AGG_HEADER = "method,ell,stat,cov_err,proj_err,wall_s,nnz_ops"

TRIAL_STRIDE = 0x9E3779B97F4A7C15


def _load_matrix(path, fmt=None):
    if fmt is None:
        fmt = "libsvm" if str(path).endswith((".svm", ".libsvm", ".txt")) else "csv"
    if fmt == "csv":
        return data_io.load_csv_dense(path)
    if fmt == "libsvm":
        return data_io.load_libsvm(path)
    raise ArgumentError(f"unknown input format {fmt!r}")


def _default_batch_rows(matrix, ell):
    base = 2 * matrix.cols if isinstance(matrix, SparseMatrix) else matrix.cols
    return max(base, ell)


def _dense_chunk(matrix, lo, hi):
    if isinstance(matrix, SparseMatrix):
        sub = SparseMatrix(
            hi - lo,
            matrix.cols,
            matrix.row_ptr[lo: hi + 1] - matrix.row_ptr[lo],
            matrix.col_idx[matrix.row_ptr[lo]: matrix.row_ptr[hi]],
            matrix.values[matrix.row_ptr[lo]: matrix.row_ptr[hi]],
        )
        return sub.to_dense()
    return DenseMatrix._wrap(matrix.data[lo:hi])


def run_sketch(matrix, method, ell, m, q, batch_rows, seed):
    """Sketch a matrix with one method; returns the sketch and run accounting.

    Wall time covers computation only; callers do IO outside.
    """
    if method not in METHODS:
        raise ArgumentError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if batch_rows is None:
        batch_rows = _default_batch_rows(matrix, ell)
    if method == METHOD_FD:
        t0 = time.perf_counter()
        sk = FdSketch(ell, matrix.cols)
        for lo in range(0, matrix.rows, batch_rows):
            sk.insert(_dense_chunk(matrix, lo, min(lo + batch_rows, matrix.rows)))
        b = sk.finalize()
        wall = time.perf_counter() - t0
        batches = -(-matrix.rows // batch_rows)
        return b, wall, {"fd_shrink": wall}, 0, [], batches
    kind = KIND_GAUSSIAN if method == METHOD_GA else KIND_COUNTSKETCH
    cfg = RbkifdConfig(
        bki=RbkiConfig(ell=ell, m=m, q=q, kind=kind),
        d=matrix.cols,
        batch_rows=batch_rows,
        seed=seed,
    )
    source = InMemorySource(matrix, batch_rows)
    t0 = time.perf_counter()
    result = run_stream(source, cfg)
    wall = time.perf_counter() - t0
    return (
        result.b_matrix,
        wall,
        result.wall_times,
        result.op_counts.multiply_adds,
        result.flags,
        result.batches,
    )


def cmd_gen(args):
    if args.dense == args.sparse:
        raise ArgumentError("choose exactly one of --dense / --sparse")
    if args.dense:
        if args.k is None:
            raise ArgumentError("--dense generation needs --k")
        spec = data_io.SyntheticSpec(
            n=args.n, d=args.d, k=args.k, zeta=args.zeta, decay=args.decay, seed=args.seed
        )
        data_io.write_csv(args.out, data_io.gen_dense(spec))
    else:
        spec = data_io.SparseSpec(n=args.n, d=args.d, density=args.density, seed=args.seed)
        data_io.write_libsvm(args.out, data_io.gen_sparse(spec))
    print(f"wrote {args.out}")
    return 0


def cmd_sketch(args):
    matrix = _load_matrix(args.input, args.format)
    m = args.m if args.m is not None else args.ell + args.m_offset
    b, wall, timings, madds, flags, batches = run_sketch(
        matrix, args.method, args.ell, m, args.q, args.batch_rows, args.seed
    )
    data_io.write_csv(args.out, b)
    manifest = args.manifest or (str(args.out) + ".manifest.jsonl")
    if args.deterministic:
        wall = 0.0
        timings = {k: 0.0 for k in timings}
    config = {
        "input": str(args.input),
        "method": args.method,
        "ell": args.ell,
        "m": m,
        "q": args.q,
        "batch_rows": args.batch_rows,
        "seed": args.seed,
        "rows": matrix.rows,
        "cols": matrix.cols,
        "batches": batches,
    }
    with open(manifest, "w", newline="\n") as fh:
        fh.write(json.dumps({"record": "config", **config}, sort_keys=True) + "\n")
        fh.write(
            json.dumps({"record": "timings", "wall_s": wall, **timings}, sort_keys=True) + "\n"
        )
        fh.write(json.dumps({"record": "counters", "multiply_adds": madds}, sort_keys=True) + "\n")
        fh.write(json.dumps({"record": "flags", "flags": flags}, sort_keys=True) + "\n")
    print(f"wrote {args.out} and {manifest}")
    return 0


def _dense_for_eval(matrix):
    return matrix.to_dense() if isinstance(matrix, SparseMatrix) else matrix


def cmd_eval(args):
    a = _dense_for_eval(_load_matrix(args.input, args.format))
    b = data_io.load_csv_dense(args.sketch)
    report = metrics.error_report(a, b, args.k)
    holds = metrics.projection_bound_holds(a, b, args.k)
    header = ["k", "ell", "cov_err", "proj_err", "raw_cov", "raw_proj", "proj_bound_holds"]
    row = [
        str(report.k),
        str(report.ell),
        data_io.fmt(report.covariance_error),
        data_io.fmt(report.projection_error),
        data_io.fmt(report.raw_covariance),
        data_io.fmt(report.raw_projection),
        "true" if holds else "false",
    ]
    if args.bounds:
        header.append("fd_bound")
        row.append(data_io.fmt(metrics.fd_error_bound(a, args.k, report.ell)))
        if args.method in (METHOD_GA, METHOD_CS):
            if args.s is None or args.m is None:
                raise ArgumentError("the ga/cs bound columns need --s and --m")
            inputs = metrics.bound_inputs_from(
                a, s=args.s, ell=report.ell, m=args.m, q=args.q, k=args.k,
                eta=args.eta, eps=args.eps, p=args.p,
            )
            if args.method == METHOD_GA:
                header.append("ga_bound")
                row.append(data_io.fmt(metrics.ga_error_bound(inputs)))
            else:
                header.append("cs_bound")
                row.append(data_io.fmt(metrics.cs_error_bound(inputs)))
    with open(args.out, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        fh.write(",".join(row) + "\n")
    print(f"wrote {args.out}")
    return 0


def _mean(vals):
    return sum(vals) / len(vals)


def _median(vals):
    v = sorted(vals)
    mid = len(v) // 2
    return v[mid] if len(v) % 2 else 0.5 * (v[mid - 1] + v[mid])


def cmd_sweep(args):
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise ArgumentError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    try:
        ells = sorted({int(e) for e in args.ells.split(",") if e.strip()})
    except ValueError as exc:
        raise ArgumentError(f"bad --ells value: {exc}")
    if not methods or not ells:
        raise ArgumentError("sweep needs at least one method and one ell")
    if args.trials < 1:
        raise ArgumentError("sweep needs at least one trial")
    matrix = _load_matrix(args.input, args.format)
    a_dense = _dense_for_eval(matrix)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("SKETCH_THREADS", "1"))
    if threads < 1:
        raise ArgumentError("thread count must be positive")

    jobs = [
        (method, ell, trial)
        for method in methods
        for ell in ells
        for trial in range(args.trials)
    ]

    def one(job):
        method, ell, trial = job
        seed = (args.seed + trial * TRIAL_STRIDE) & SEED_MASK
        row = {
            "method": method,
            "ell": ell,
            "trial": trial,
            "cov_err": math.nan,
            "proj_err": math.nan,
            "wall_s": math.nan,
            "nnz_ops": 0,
            "error": None,
        }
        try:
            b, wall, _, madds, _, _ = run_sketch(
                matrix, method, ell, ell + args.m_offset, args.q, args.batch_rows, seed
            )
            report = metrics.error_report(a_dense, b, args.k)
        except Exception as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
            return row
        row["cov_err"] = report.covariance_error
        row["proj_err"] = report.projection_error
        row["wall_s"] = 0.0 if args.deterministic else wall
        row["nnz_ops"] = madds
        return row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(j) for j in jobs]
    rows.sort(key=lambda r: (r["method"], r["ell"], r["trial"]))

    os.makedirs(args.out_dir, exist_ok=True)
    rows_path = os.path.join(args.out_dir, "rows.csv")
    with open(rows_path, "w", newline="\n") as fh:
        fh.write(ROWS_HEADER + "\n")
        for r in rows:
            fh.write(
                f"{r['method']},{r['ell']},{r['trial']},{data_io.fmt(r['cov_err'])},"
                f"{data_io.fmt(r['proj_err'])},{data_io.fmt(r['wall_s'])},{r['nnz_ops']}\n"
            )

    failed = [r for r in rows if r["error"] is not None]
    if failed:
        with open(os.path.join(args.out_dir, "errors.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "ell", "trial", "error"])
            for r in failed:
                w.writerow([r["method"], r["ell"], r["trial"], r["error"]])
        print(f"{len(failed)} of {len(rows)} sweep cells failed; see errors.csv", file=sys.stderr)

    agg_path = os.path.join(args.out_dir, "aggregates.csv")
    agg = {}
    for r in rows:
        if r["error"] is None:
            agg.setdefault((r["method"], r["ell"]), []).append(r)
    if not agg:
        raise NumericalError("every sweep cell failed; see errors.csv")
    with open(agg_path, "w", newline="\n") as fh:
        fh.write(AGG_HEADER + "\n")
        for (method, ell) in sorted(agg):
            group = agg[(method, ell)]
            for stat, f in (("mean", _mean), ("median", _median)):
                fh.write(
                    f"{method},{ell},{stat},"
                    f"{data_io.fmt(f([g['cov_err'] for g in group]))},"
                    f"{data_io.fmt(f([g['proj_err'] for g in group]))},"
                    f"{data_io.fmt(f([g['wall_s'] for g in group]))},"
                    f"{data_io.fmt(f([g['nnz_ops'] for g in group]))}\n"
                )

    for metric_name, fname, label in (
        ("cov_err", "cov_err.svg", "covariance error"),
        ("proj_err", "proj_err.svg", "projection error"),
        ("wall_s", "wall_s.svg", "wall seconds"),
    ):
        series = []
        for method in sorted(methods):
            xs, ys = [], []
            for ell in ells:
                group = agg.get((method, ell))
                if group:
                    xs.append(ell)
                    ys.append(_mean([g[metric_name] for g in group]))
            if xs:
                series.append((method, xs, ys))
        write_line_chart(
            os.path.join(args.out_dir, fname),
            f"{label} vs sketch size",
            "sketch size",
            label,
            series,
        )
    print(f"wrote {rows_path}, {agg_path} and 3 plots under {args.out_dir}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="krylovsketch",
        description="Streaming sketch benchmark: generate, sketch, evaluate, sweep.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic matrix file")
    p.add_argument("--dense", action="store_true")
    p.add_argument("--sparse", action="store_true")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--zeta", type=float, default=10.0)
    p.add_argument(
        "--decay",
        choices=(data_io.DECAY_LINEAR, data_io.DECAY_FAST, data_io.DECAY_SLOW),
        default=data_io.DECAY_LINEAR,
    )
    p.add_argument("--density", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sketch", help="sketch a matrix file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "libsvm"), default=None)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--m-offset", type=int, default=5)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--batch-rows", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", default=None)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_sketch)

    p = sub.add_parser("eval", help="evaluate a sketch against its source matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "libsvm"), default=None)
    p.add_argument("--sketch", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bounds", action="store_true")
    p.add_argument("--method", choices=METHODS, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--p", type=float, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run a method x ell x trial grid")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "libsvm"), default=None)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--ells", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m-offset", type=int, default=5)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--batch-rows", type=int, default=None)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
