"""Head-to-head timing of the compiled kernels against the numpy reference.

Runs each hot kernel on a representative workload under both backends, checks
the outputs agree, then times one full countsketch-start streaming sketch per
backend. Results print as a plain table; pass --csv to also save them.

Usage: python benchmarks/bench_kernels.py [--trials 5] [--scale 1.0] [--csv out.csv]
"""

import argparse
import sys
import time
from contextlib import contextmanager

import numpy as np

import krylovsketch.kernels as kernels
from krylovsketch import (
    InMemorySource,
    KIND_COUNTSKETCH,
    RbkiConfig,
    RbkifdConfig,
    countsketch_map,
    gen_sparse,
    run_stream,
)
from krylovsketch.data_io import SparseSpec
from krylovsketch.kernels import _numpy_ref

KERNEL_NAMES = ("csr_dense", "csr_t_dense", "countsketch_dense", "countsketch_csr")


def load_backends():
    backends = [("numpy", _numpy_ref)]
    try:
        from krylovsketch.kernels import _ckernels
        backends.append(("cython", _ckernels))
    except ImportError:
        pass
    return backends


@contextmanager
def use_backend(impl):
    saved = {name: getattr(kernels, name) for name in KERNEL_NAMES}
    for name in KERNEL_NAMES:
        setattr(kernels, name, getattr(impl, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def best_of(fn, trials):
    best = float("inf")
    out = None
    for _ in range(trials):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def kernel_workloads(scale, seed=0):
    """Returns (name, callable-builder) pairs sized for sub-second numpy runs."""
    g = np.random.Generator(np.random.Philox(key=seed))
    n, d = int(20000 * scale), 1000
    sp = gen_sparse(SparseSpec(n=n, d=d, density=0.002, seed=seed))
    dense_right = g.standard_normal((d, 32))
    dense_left = g.standard_normal((n, 32))
    block = g.standard_normal((int(4000 * scale), 512))
    cs_cols = countsketch_map(d, 256, seed)
    cs_block = countsketch_map(512, 1024, seed)

    def jobs(impl):
        return (
            ("csr_dense", lambda: impl.csr_dense(sp.row_ptr, sp.col_idx, sp.values, sp.rows, dense_right)),
            ("csr_t_dense", lambda: impl.csr_t_dense(sp.row_ptr, sp.col_idx, sp.values, sp.cols, dense_left)),
            ("countsketch_dense", lambda: impl.countsketch_dense(block, cs_block.buckets, cs_block.signs, cs_block.m)),
            ("countsketch_csr", lambda: impl.countsketch_csr(sp.row_ptr, sp.col_idx, sp.values, sp.rows, cs_cols.buckets, cs_cols.signs, cs_cols.m)),
        )

    return jobs


def end_to_end(scale, impl, seed=0):
    a = gen_sparse(SparseSpec(n=int(20000 * scale), d=1000, density=0.002, seed=seed))
    cfg = RbkifdConfig(
        bki=RbkiConfig(ell=12, m=20, q=2, kind=KIND_COUNTSKETCH),
        d=a.cols,
        batch_rows=2000,
        seed=seed,
    )
    with use_backend(impl):
        t0 = time.perf_counter()
        result = run_stream(InMemorySource(a, 2000), cfg)
        wall = time.perf_counter() - t0
    return wall, result.b_matrix.data


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--scale", type=float, default=1.0,
                        help="workload size multiplier")
    parser.add_argument("--csv", default=None)
    args = parser.parse_args(argv)

    backends = load_backends()
    if len(backends) == 1:
        print("compiled backend not built; timing the numpy reference only")

    jobs = kernel_workloads(args.scale)
    rows = []
    outputs = {}
    for name, impl in backends:
        for kernel, fn in jobs(impl):
            secs, out = best_of(fn, args.trials)
            rows.append((kernel, name, secs))
            outputs.setdefault(kernel, {})[name] = np.asarray(out)

    if len(backends) == 2:
        for kernel, outs in outputs.items():
            if not np.allclose(outs["numpy"], outs["cython"], rtol=1e-12, atol=1e-12):
                print(f"warning: backend outputs disagree for {kernel}", file=sys.stderr)

    for name, impl in backends:
        secs, b = end_to_end(args.scale, impl)
        rows.append(("full_cs_sketch", name, secs))
        outputs.setdefault("full_cs_sketch", {})[name] = b

    timing = {(k, b): s for k, b, s in rows}
    print(f"{'kernel':<20} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8}")
    for kernel in list(KERNEL_NAMES) + ["full_cs_sketch"]:
        base = timing[(kernel, "numpy")] * 1e3
        if len(backends) == 2:
            fast = timing[(kernel, "cython")] * 1e3
            print(f"{kernel:<20} {base:>10.3f} {fast:>10.3f} {base / fast:>7.2f}x")
        else:
            print(f"{kernel:<20} {base:>10.3f} {'-':>10} {'-':>8}")

    if args.csv:
        with open(args.csv, "w", newline="\n") as fh:
            fh.write("kernel,backend,seconds\n")
            for kernel, backend_name, secs in rows:
                fh.write(f"{kernel},{backend_name},{secs:.9f}\n")
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
