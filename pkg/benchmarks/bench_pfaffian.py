#!/usr/bin/env python3
"""Compare the numba and pure-numpy Pfaffian backends.

Two measurements:
1. the batched kernel on random skew-symmetric stacks of the sizes the
   probe suite produces;
2. an end-to-end nullity check, run in a subprocess per backend so that
   ``DISFERMION_NO_NUMBA`` selects the path exactly as a user would.

    python benchmarks/bench_pfaffian.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from disfermion import _accel


def random_stack(t, k, rng):
    a = rng.standard_normal((t, k, k)) + 1j * rng.standard_normal((t, k, k))
    return a - a.transpose(0, 2, 1)


def time_call(fn, a, repeat):
    fn(a)  # warm up (numba compiles on first call)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(a)
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for t, k in ((4096, 2), (4096, 4), (2048, 6), (1024, 8), (256, 16)):
        a = random_stack(t, k, rng)
        ref = _accel.pfaffian_batch_numpy(a)
        row = {"batch": t, "size": k, "numpy_s": time_call(_accel.pfaffian_batch_numpy, a, repeat)}
        if _accel._NUMBA_KERNEL is not None:
            row["numba_s"] = time_call(_accel._NUMBA_KERNEL, a, repeat)
            diff = np.abs(_accel._NUMBA_KERNEL(a) - ref) / np.maximum(1, np.abs(ref))
            row["max_rel_diff"] = float(np.max(diff))
            row["speedup"] = row["numpy_s"] / row["numba_s"]
        rows.append(row)
    return rows


_FIELD_SNIPPET = """
import time
from disfermion import _accel
from disfermion.fields import LocalField, is_null
F = LocalField.from_points((1, 0), (0, 0)) * LocalField.from_points((0, 1), (-1, 1))
is_null(F)
t0 = time.perf_counter()
v = is_null(F)
print(_accel.BACKEND, time.perf_counter() - t0, v.max_residual)
"""


def field_table():
    out = []
    for flag in (None, "1"):
        env = dict(os.environ)
        env.pop("DISFERMION_NO_NUMBA", None)
        if flag:
            env["DISFERMION_NO_NUMBA"] = flag
        res = subprocess.run([sys.executable, "-c", _FIELD_SNIPPET], env=env,
                             capture_output=True, text=True, check=True)
        backend, secs, resid = res.stdout.split()
        out.append({"backend": backend, "is_null_s": float(secs), "max_residual": float(resid)})
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    print(f"{'batch':>6} {'size':>4} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8} {'rel diff':>9}")
    rows = kernel_table(args.repeat)
    for r in rows:
        print(f"{r['batch']:6d} {r['size']:4d} {1e3 * r['numpy_s']:10.3f} "
              f"{1e3 * r.get('numba_s', float('nan')):10.3f} {r.get('speedup', float('nan')):8.2f} "
              f"{r.get('max_rel_diff', float('nan')):9.1e}")
    fields = field_table()
    for f in fields:
        print(f"is_null (two-pair field) backend={f['backend']:<5s} {f['is_null_s']:.3f} s")
    print(json.dumps({"kernel": rows, "field": fields}))


if __name__ == "__main__":
    main()
