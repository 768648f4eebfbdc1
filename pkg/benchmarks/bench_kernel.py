"""Compare the compiled elimination kernel with the pure-Python fallback.

Run: python3 benchmarks/bench_kernel.py [--repeat R] [--quick]
Both backends must return identical pairs and survivors; timings are the
best of R runs on each input.
"""

import argparse
import random
import time

from knotsurg import _kernel_py
from knotsurg.homology import _compiled, as_free, homology
from knotsurg.surgery import glue, knot_surgery
from knotsurg.zoo import make_dn, preset_knot


def random_complex(n, density, N, seed):
    rng = random.Random(seed)
    ent = []
    for s in range(n):
        for d in range(n):
            if s != d and rng.random() < density:
                ent.append((s, d, rng.getrandbits(N) | 1 << rng.randrange(N)))
    return ent


def best(fn, repeat):
    t = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        t = min(t, time.perf_counter() - t0)
    return t, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smallest random case only")
    args = ap.parse_args()
    if _compiled is None:
        print("compiled kernel unavailable; only the fallback is built")
        return
    sizes = (100,) if args.quick else (100, 200, 300)
    cases = [(f"random n={n}", n, random_complex(n, 0.05, 32, n), 32) for n in sizes]
    surg = [("trefoil +2", knot_surgery(preset_knot("trefoil", 2), 8, 16)),
            ("T(3,4) +1", knot_surgery(preset_knot("T(3,4)", 1), 10, 16)),
            ("glue D2 D3", glue(make_dn(2), make_dn(3), 8, 16))]
    for name, c in surg:
        fc = as_free(c)
        cases.append((name, len(fc), [(s, t, m) for (s, t), m in fc.entries.items()], fc.N))
    bad = []
    print(f"{'case':<16} {'gens':>5} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, n, ent, N in cases:
        tp, rp = best(lambda: _kernel_py.eliminate(n, ent, N), args.repeat)
        tc, rc = best(lambda: _compiled.eliminate(n, list(ent), N), args.repeat)
        same = tuple(map(list, rp)) == tuple(map(list, rc))
        print(f"{name:<16} {n:>5} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x" + ("" if same else "  MISMATCH"))
        if not same:
            bad.append(name)
    for name, c in surg:
        a, b = homology(c, "python"), homology(c, "cython")
        if a.summary() != b.summary():
            bad.append(name + " homology")
    if bad:
        raise SystemExit(f"backends disagree: {bad}")


if __name__ == "__main__":
    main()
