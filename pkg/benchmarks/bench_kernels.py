"""Compiled vs pure-Python kernels: component labeling and point-in-polygon.

Run ``python benchmarks/bench_kernels.py``; prints one line per case with
the median time of each backend and the speedup. Outputs are also checked
for exact agreement.
"""

import argparse
import statistics
import time

import numpy as np

from specpart import _ccl_py, kernels

try:
    from specpart import _ccl
except ImportError:  # extension not built
    _ccl = None


def _time(fn, repeat):
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return statistics.median(out)


def labeling_case(n, rng):
    x = np.linspace(0, 6 * np.pi, n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    keys = np.sign(np.sin(X) * np.sin(1.3 * Y) + 0.2 * rng.standard_normal(X.shape)).astype(np.int32)
    return keys


def polygon_case(n, rng):
    ang = np.sort(rng.uniform(0, 2 * np.pi, 40))
    r = 1 + 0.3 * rng.uniform(size=40)
    verts = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
    pts = rng.uniform(-1.4, 1.4, size=(n, 2))
    return verts, pts


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    if _ccl is None:
        print("compiled extension not built; nothing to compare")
        return 1
    print(f"{'case':<28} {'compiled [s]':>13} {'python [s]':>12} {'speedup':>9}")
    for n in (64, 256, 512):
        keys = labeling_case(n, rng)
        a = kernels.label_components(keys, impl=_ccl)
        b = kernels.label_components(keys, impl=_ccl_py)
        assert a[1] == b[1] and np.array_equal(a[0], b[0])
        tc = _time(lambda: kernels.label_components(keys, impl=_ccl), args.repeat)
        tp = _time(lambda: kernels.label_components(keys, impl=_ccl_py), args.repeat)
        print(f"{'label ' + f'{n}x{n}':<28} {tc:>13.5f} {tp:>12.5f} {tp / tc:>9.1f}")
    for n in (10_000, 100_000):
        verts, pts = polygon_case(n, rng)
        a = kernels.points_in_polygon(pts[:, 0], pts[:, 1], verts, impl=_ccl)
        b = kernels.points_in_polygon(pts[:, 0], pts[:, 1], verts, impl=_ccl_py)
        assert np.array_equal(a, b)
        tc = _time(lambda: kernels.points_in_polygon(pts[:, 0], pts[:, 1], verts, impl=_ccl), args.repeat)
        tp = _time(lambda: kernels.points_in_polygon(pts[:, 0], pts[:, 1], verts, impl=_ccl_py), args.repeat)
        print(f"{'point-in-polygon ' + str(n):<28} {tc:>13.5f} {tp:>12.5f} {tp / tc:>9.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
