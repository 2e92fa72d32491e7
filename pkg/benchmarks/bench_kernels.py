"""Time the compiled kernels against the NumPy fallback on the workloads the library runs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time of both backends and checks that the
results agree.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from twistgpd import _kernels_py
from twistgpd.algebra import Element
from twistgpd.cocycle import Bicharacter, Trivial
from twistgpd.groupoid import GroupModel, Pair
from twistgpd.groups import zd
from twistgpd.rep import regular_rep_matrix

try:
    from twistgpd import _kernels
except ImportError:  # extension not built
    _kernels = None


def _best(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def power_iteration_case(truncation):
    model = GroupModel(zd(1))
    f = Element.build(model, [((0,), 1), ((1,), 1), ((2,), 1j)])
    R = regular_rep_matrix(Trivial(model), f, 0, truncation)
    x0 = np.random.default_rng(0).standard_normal(R.size) + 0j
    args = (R.rows, R.cols, R.vals, R.size, R.size, x0, 20_000, 1e-10)
    return f"power iteration, Z, truncation {truncation}", args, lambda k: k.coo_power_iteration(*args), 0


def rotation_case(truncation):
    model = GroupModel(zd(2))
    sigma = Bicharacter(model, [[0, "1/4"], [0, 0]])
    f = Element.build(model, [((1, 0), 1), ((0, 1), 1), ((-1, 0), 1), ((0, -1), 1)])
    R = regular_rep_matrix(sigma, f, 0, truncation)
    x0 = np.random.default_rng(1).standard_normal(R.size) + 0j
    args = (R.rows, R.cols, R.vals, R.size, R.size, x0, 20_000, 1e-10)
    return f"power iteration, Z^2 rotation, truncation {truncation}", args, lambda k: k.coo_power_iteration(*args), 0


def symbol_case(grid):
    exps = np.array([[0], [1], [2]], dtype=np.int64)
    coeffs = np.array([1, 1, 1j], dtype=np.complex128)
    return f"symbol grid maximum, grid {grid}", None, lambda k: k.symbol_grid_max(exps, coeffs, grid), 0


def convolution_case(n):
    model = Pair(n)
    t = model.tables()
    rng = np.random.default_rng(2)
    size = t.size
    f = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    g = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    phase = np.exp(2j * np.pi * rng.integers(0, 12, (size, size)) / 12)
    comp = np.ascontiguousarray(t.comp, dtype=np.int64)
    return f"float convolution, Pair({n}), {size} arrows", None, lambda k: k.twisted_convolution(comp, f, g, phase), None


def _agree(a, b, idx):
    if idx is None:
        return bool(np.allclose(a, b, atol=1e-9))
    return abs(a[idx] - b[idx]) <= 1e-6 * max(1.0, abs(a[idx]))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    cases = [
        power_iteration_case(128),
        power_iteration_case(512),
        rotation_case(256),
        symbol_case(100_000),
        convolution_case(8),
        convolution_case(14),
    ]
    print(f"{'workload':<48} {'compiled (s)':>13} {'numpy (s)':>11} {'speedup':>8}  agree")
    for name, _, run, idx in cases:
        tp, rp = _best(lambda: run(_kernels_py), args.repeat)
        if _kernels is None:
            print(f"{name:<48} {'n/a':>13} {tp:>11.4f} {'':>8}  -")
            continue
        tc, rc = _best(lambda: run(_kernels), args.repeat)
        print(f"{name:<48} {tc:>13.4f} {tp:>11.4f} {tp / tc:>8.1f}  {_agree(rc, rp, idx)}")


if __name__ == "__main__":
    main()
