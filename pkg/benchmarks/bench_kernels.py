"""Compare the numba and numpy trellis kernels on one inner and one outer frame.

    python benchmarks/bench_kernels.py [--len 3000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from qtc.channel import DepolarizingChannel, sample_symbols, symbol_priors
from qtc.qcc import CodeSpec, SyndromeSequence, siso_decode, track_symbols
from qtc.registry import Registry


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--len", type=int, default=3000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    reg = Registry()
    rng = np.random.default_rng(0)
    ch = DepolarizingChannel(0.3)
    cases = []
    inner = CodeSpec.for_logical_length(reg.get("opt-inner"), args.len)
    p = sample_symbols(ch, inner.n_physical, rng)
    _, s, m0 = track_symbols(inner, p)
    cases.append(("inner SISO", inner, np.broadcast_to(symbol_priors(ch), (inner.n_physical, 4)), SyndromeSequence.from_symbols(inner.seed, s, m0), False))
    outer = CodeSpec(reg.get("opt-outer"), max(1, (args.len - 3) // 3), "outer")
    p = rng.integers(0, 4, outer.n_physical)
    _, s, m0 = track_symbols(outer, p)
    pri = np.full((outer.n_physical, 4), 0.25)
    cases.append(("outer SISO (with P)", outer, pri, SyndromeSequence.from_symbols(outer.seed, s, m0), True))

    print(f"{'case':24s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, spec, pri, syn, want_p in cases:
        siso_decode(spec, pri, None, syn, want_p, backend="numba")  # compile
        tn = best_of(lambda: siso_decode(spec, pri, None, syn, want_p, backend="numba"), args.repeat)
        tp = best_of(lambda: siso_decode(spec, pri, None, syn, want_p, backend="numpy"), args.repeat)
        print(f"{name:24s} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f}")


if __name__ == "__main__":
    main()
