"""Compare the compiled and numpy reading-density kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--threads N]
"""
import argparse
import dataclasses
import os
import time

import numpy as np


def timed(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()
    if args.threads:
        os.environ["WEAKPATH_THREADS"] = str(args.threads)

    from weakpath import kernels
    from weakpath.hilbert import random_unitary
    from weakpath.pathways import spectral_from_basis
    from weakpath.pointers import reading_distribution
    from weakpath.profiles import PointerSpec
    from weakpath.scenarios import build_three_box, random_scenario

    rng = np.random.default_rng(0)
    backends = kernels.available_backends()
    cases = []
    for paths, sizes in [(3, (4000,)), (16, (20000,)), (3, (600, 600)), (9, (1000, 1000)), (16, (1500, 1500))]:
        amps = rng.normal(size=(1, paths)) + 1j * rng.normal(size=(1, paths))
        tables = [rng.normal(size=(paths, m)) for m in sizes]
        cases.append((f"P={paths} grid={'x'.join(map(str, sizes))}", amps, tables))

    print(f"backends: {', '.join(backends)}  threads: {kernels.thread_count()}")
    print(f"{'case':32s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, amps, tables in cases:
        times = [timed(lambda b=b: kernels.density(amps, tables, backend=b), args.repeat) for b in backends]
        line = f"{name:32s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[1 - backends.index('cython')] / times[backends.index('cython')]:11.1f}x"
        print(line)

    s = build_three_box(["B", "Bprime"], [PointerSpec.gaussian(1.0), PointerSpec.gaussian(0.5)])
    for b in backends:
        t = timed(lambda b=b: reading_distribution(s, backend=b), args.repeat)
        print(f"three-box joint distribution ({b}): {t * 1e3:.1f}ms")
    # random bases with fixed, evenly spaced eigenvalues keep the default grid moderate
    base = random_scenario(rng, 4, 2)
    steps = tuple(dataclasses.replace(st, observable=spectral_from_basis(random_unitary(rng, 4), [0, 1, 2, 3]),
                                      pointer=PointerSpec.gaussian(2.0)) for st in base.steps)
    s = base.replace(steps=steps)
    for b in backends:
        t = timed(lambda b=b: reading_distribution(s, backend=b), args.repeat)
        print(f"random N=4 two pointers ({b}): {t * 1e3:.1f}ms")


if __name__ == "__main__":
    main()
