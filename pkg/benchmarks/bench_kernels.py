"""Compiled vs pure-Python kernels.

Times the raw kernels on random inputs, then two end-to-end workloads with
the compiled module switched off and on.

    python benchmarks/bench_kernels.py [--repeat N] [--json]
"""

import argparse
import json
import random
import timeit

from wittlift import _kernels, crysfrob, qfsplit
from wittlift._kernels import _pure


def dense_case(rng, n, q):
    return [rng.randrange(q) for _ in range(n)], [rng.randrange(q) for _ in range(n)], q


def sparse_case(rng, n, q, span=1 << 20):
    ka = rng.sample(range(span), n)
    kb = rng.sample(range(span), n)
    return ka, [rng.randrange(1, q) for _ in ka], kb, [rng.randrange(1, q) for _ in kb], q


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def with_backend(compiled, fn):
    saved = _kernels._fast
    if not compiled:
        _kernels._fast = None
    try:
        return fn()
    finally:
        _kernels._fast = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="print rows as JSON")
    args = ap.parse_args()
    if _kernels._fast is None:
        raise SystemExit("compiled kernels unavailable; build with pip install -e . --no-build-isolation")
    fast = _kernels._fast
    rng = random.Random(1)
    rows = []

    for n in (64, 256, 1024):
        a, b, q = dense_case(rng, n, 5**4)
        rows.append((f"poly_mul_mod n={n}", best(lambda: _pure.poly_mul_mod(a, b, q), args.repeat),
                     best(lambda: fast.poly_mul_mod(a, b, q), args.repeat)))
    for n in (100, 400):
        case = sparse_case(rng, n, 7**2)
        rows.append((f"sparse_mul_mod {n}x{n}", best(lambda: _pure.sparse_mul_mod(*case), args.repeat),
                     best(lambda: fast.sparse_mul_mod(*case), args.repeat)))

    def frob():
        return crysfrob.frobenius_matrix(16, 1, 13, slack=2)

    def height():
        return qfsplit.qf_height_elliptic(1, 0, 7)

    for name, fn in (("frobenius_matrix p=13", frob), ("qf_height_elliptic p=7", height)):
        rows.append((name, best(lambda: with_backend(False, fn), max(1, args.repeat // 2)),
                     best(lambda: with_backend(True, fn), max(1, args.repeat // 2))))

    if args.json:
        print(json.dumps([{"case": c, "pure_s": p, "cython_s": f, "speedup": p / f} for c, p, f in rows], indent=2))
        return
    print(f"{'case':<26}{'pure (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for case, p, f in rows:
        print(f"{case:<26}{p:>12.5f}{f:>12.5f}{p / f:>9.1f}x")


if __name__ == "__main__":
    main()
