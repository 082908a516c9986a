"""Compare the numba and numpy kernels on typical utterance sizes.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Each row reports the best-of-repeat time per call and checks that both
backends return identical results.
"""

import argparse
import time

import numpy as np

from heterolabel import _kernels as K

# (tokens, frames, encoding dim)
SIZES = [(8, 40, 16), (30, 150, 64), (60, 400, 128), (120, 900, 192)]


def best_of(fn, args, repeat):
    fn(*args)  # warm-up (JIT compile on first numba call)
    t = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        t = min(t, time.perf_counter() - t0)
    return t


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not hasattr(K, "viterbi_numba"):
        raise SystemExit("numba unavailable (or HETEROLABEL_NO_NUMBA set); nothing to compare")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<8} {'N':>4} {'M':>5} {'d':>4} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for n, m, d in SIZES:
        tokens = rng.normal(size=(n, d)).astype(np.float32)
        frames = rng.normal(size=(m, d)).astype(np.float32)
        dist = K.pairwise_l2_numba(tokens, frames)
        assert np.array_equal(dist, K.pairwise_l2_numpy(tokens, frames))
        assert np.array_equal(K.viterbi_numba(dist), K.viterbi_numpy(dist))
        for name, slow, fast, fargs in [
            ("l2", K.pairwise_l2_numpy, K.pairwise_l2_numba, (tokens, frames)),
            ("viterbi", K.viterbi_numpy, K.viterbi_numba, (dist,)),
        ]:
            ts = best_of(slow, fargs, args.repeat)
            tf = best_of(fast, fargs, args.repeat)
            print(f"{name:<8} {n:>4} {m:>5} {d:>4} {ts * 1e3:>10.3f} {tf * 1e3:>10.3f} {ts / tf:>7.1f}x")


if __name__ == "__main__":
    main()
