"""Compare the compiled CSR kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--size 64] [--density 0.1] [--repeat 200] [--suite-n 2]

Kernel timings call both backends directly on the same operands; the suite
timing runs the Kähler identity check in a subprocess with and without
HODGEKIT_PURE_PYTHON=1.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

import numpy as np

from hodgekit import _sparse_py
from hodgekit.scalars import QQ_I
from hodgekit.sparse import ExactSparse, _compiled


def random_sparse(size: int, density: float, rng: random.Random) -> ExactSparse:
    entries = {}
    for r in range(size):
        for c in range(size):
            if rng.random() < density:
                entries[(r, c)] = QQ_I(rng.randint(-9, 9), rng.randint(-9, 9))
    return ExactSparse.from_dict((size, size), entries)


def time_kernel(fn, args, repeat: int) -> float:
    return min(timeit.repeat(lambda: fn(*args), number=repeat, repeat=3)) / repeat * 1e6


def suite_seconds(n: int, pure: bool) -> float:
    env = dict(os.environ)
    env.pop("HODGEKIT_PURE_PYTHON", None)
    if pure:
        env["HODGEKIT_PURE_PYTHON"] = "1"
    code = (
        "import time; from hodgekit.torus import kahler_identity_suite;"
        f"t = time.perf_counter(); r = kahler_identity_suite({n}, max_mode=2);"
        "assert r.passed; print(time.perf_counter() - t)"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--density", type=float, default=0.1)
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--suite-n", type=int, default=2, help="complex dimension for the suite timing (0 skips it)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _compiled is None:
        print("compiled kernels unavailable; nothing to compare")
        return 1
    rng = random.Random(args.seed)
    A = random_sparse(args.size, args.density, rng)
    B = random_sparse(args.size, args.density, rng)
    mm = (A.indptr, A.indices, A.re, A.im, B.indptr, B.indices, B.re, B.im, args.size, args.size)
    lc = (A.indptr, A.indices, A.re, A.im, 2, 1, B.indptr, B.indices, B.re, B.im, -1, 3, args.size)
    same = zip(map(_as_ints, _compiled.matmul(*mm)), map(_as_ints, _sparse_py.matmul(*mm)))
    assert all((x == y).all() for x, y in same), "backends disagree"

    print(f"{args.size}x{args.size}, density {args.density}, nnz {A.nnz} and {B.nnz}")
    print(f"{'kernel':<10}{'compiled (us)':>15}{'python (us)':>15}{'speedup':>10}")
    for name, fn_c, fn_py, a in (("matmul", _compiled.matmul, _sparse_py.matmul, mm),
                                 ("lincomb", _compiled.lincomb, _sparse_py.lincomb, lc)):
        tc = time_kernel(fn_c, a, args.repeat)
        tp = time_kernel(fn_py, a, max(1, args.repeat // 10))
        print(f"{name:<10}{tc:>15.1f}{tp:>15.1f}{tp / tc:>9.1f}x")

    if args.suite_n:
        tc = suite_seconds(args.suite_n, pure=False)
        tp = suite_seconds(args.suite_n, pure=True)
        print(f"Kähler suite n={args.suite_n}, |k| <= 2: compiled {tc:.2f} s, python {tp:.2f} s, {tp / tc:.1f}x")
    return 0


def _as_ints(x):
    return np.asarray([int(v) for v in x], dtype=object)


if __name__ == "__main__":
    sys.exit(main())
