"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Kernel timings call both modules directly.  The end-to-end rows run the
p-curvature and standard-form pipelines in a subprocess, once with the
default backend and once with PARHODGE_PURE=1.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from parhodge import _kernels_py, generators as gen

try:
    from parhodge import _kernels as compiled
except ImportError:
    compiled = None

PIPELINE = """
import random, time
from parhodge import generators as gen, kernels
from parhodge.connection import p_curvature
from parhodge.normalform import standard_form
rng = random.Random(0)
cases = [gen.series(rng, gen.field(p, m), 3, 32) for p, m in [(5, 1), (7, 1), (3, 2)] for _ in range(10)]
t = time.perf_counter()
for A in cases:
    p_curvature(A)
    standard_form(A)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def kernel_rows(repeat):
    rng = np.random.default_rng(0)
    for p, m, L, n in [(5, 1, 32, 3), (7, 1, 64, 3), (3, 2, 32, 3), (2, 4, 32, 2), (5, 1, 128, 3)]:
        ctx = gen.field(p, m)
        A = rng.integers(0, p, size=(L, n, n, m), dtype=np.int64)
        B = rng.integers(0, p, size=(L, n, n, m), dtype=np.int64)
        row = [f"matmul p={p} m={m} L={L} n={n}"]
        for mod in (_kernels_py, compiled):
            if mod is None:
                row.append(float("nan"))
                continue
            row.append(min(timeit.repeat(lambda: mod.matmul_series(A, B, ctx.red, p), number=20, repeat=repeat)) / 20)
        yield row


def pipeline_rows():
    for pure in (False, True):
        env = dict(os.environ)
        if pure:
            env["PARHODGE_PURE"] = "1"
        else:
            env.pop("PARHODGE_PURE", None)
        out = subprocess.run([sys.executable, "-c", PIPELINE], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        yield backend, float(secs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; only the numpy column is meaningful")
    print(f"{'kernel':34} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, py, cy in kernel_rows(args.repeat):
        print(f"{name:34} {py * 1e3:10.3f} {cy * 1e3:10.3f} {py / cy:8.2f}")
    print()
    print("pipeline (30 rank-3 series, N=32: p-curvature + standard form)")
    for backend, secs in pipeline_rows():
        print(f"  {backend:8} {secs:7.2f} s")


if __name__ == "__main__":
    main()
