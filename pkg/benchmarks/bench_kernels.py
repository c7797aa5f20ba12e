"""Compare the compiled and numpy log-det kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times one bound program (the thm2b terms on a 4-node channel) and a
single 8x8 conditional log-det for each backend.
"""

import argparse
import timeit

import numpy as np

from coopifc import kernels
from coopifc.bounds import bound_program
from coopifc.gaussinfo import joint_covariance
from coopifc.model import SymmetricParams, build_symmetric


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=2000)
    args = ap.parse_args()

    ch = build_symmetric(SymmetricParams(1e8, alpha=0.7, beta_s=0.3, beta_d=0.2, gamma=0.1))
    F = joint_covariance(ch, np.diag(ch.P)).F
    program = bound_program("thm2b")
    t, g = np.array([7, 4], dtype=np.intp), np.array([6, 0, 2, 3], dtype=np.intp)

    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    ref = kernels.combo(F, program, backend="python")
    print(f"{'backend':8} {'program us':>11} {'logdet us':>10}")
    times = {}
    for b in backends:
        assert abs(kernels.combo(F, program, backend=b) - ref) < 1e-9
        tp = min(timeit.repeat(lambda: kernels.combo(F, program, backend=b),
                               number=args.repeat, repeat=3)) / args.repeat
        tl = min(timeit.repeat(lambda: kernels.cond_logdet(F, t, g, backend=b),
                               number=args.repeat, repeat=3)) / args.repeat
        times[b] = tp
        print(f"{b:8} {tp * 1e6:11.2f} {tl * 1e6:10.2f}")
    if len(times) == 2:
        print(f"speedup on the bound program: {times['python'] / times['cython']:.1f}x")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
