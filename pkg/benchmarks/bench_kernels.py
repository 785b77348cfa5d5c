"""Compare the compiled and numpy kernel backends.

Times the raw belief-update loop on both backends in-process, then an
ObserveAll evaluation end to end in a subprocess per backend (backend
choice is fixed at import, so it cannot be switched in one process).

    python benchmarks/bench_kernels.py [--steps 200000] [--episodes 5000]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from activesense import _kernels_py

try:
    from activesense import _kernels_c
except ImportError:
    _kernels_c = None

EVAL_SNIPPET = """
import time
from activesense import kernels
from activesense.harness import RunConfig, evaluate, make_agent
run = RunConfig(agent="observe_all", eval_episodes={episodes})
t0 = time.perf_counter()
evaluate(make_agent(run), run)
print(kernels.BACKEND, time.perf_counter() - t0)
"""


def update_loop(mod, steps, N=3):
    rng = np.random.default_rng(0)
    M = 1 << N
    bits = ((np.arange(M)[:, None] >> np.arange(N)[None, :]) & 1).astype(np.uint8)
    p = np.full(N, 0.2)
    ys = rng.integers(0, 2, size=(steps, N)).astype(np.uint8)
    masks = rng.integers(1, M, size=steps)
    pi = np.full(M, 1.0 / M)

    def run():
        cur = pi
        for y, m in zip(ys, masks):
            cur, z = mod.posterior_update(cur, bits, int(m), y, p)
            if max(cur) > 0.999:
                cur = pi
    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--episodes", type=int, default=5000)
    args = ap.parse_args(argv)

    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.append(("cython", _kernels_c))
    else:
        print("compiled extension not built; timing the numpy backend only")

    print(f"posterior_update, {args.steps} steps, N=3")
    times = {}
    for name, mod in backends:
        times[name] = min(timeit.repeat(update_loop(mod, args.steps), number=1, repeat=3))
        print(f"  {name:7s} {times[name]:8.3f} s  {1e6 * times[name] / args.steps:6.2f} us/step")
    if len(times) == 2:
        print(f"  speedup {times['python'] / times['cython']:.1f}x")

    print(f"ObserveAll evaluation, {args.episodes} episodes")
    for name, _ in backends:
        env = dict(os.environ)
        env.pop("ACTIVESENSE_PURE_PYTHON", None)
        if name == "python":
            env["ACTIVESENSE_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", EVAL_SNIPPET.format(episodes=args.episodes)],
                             env=env, capture_output=True, text=True, check=True).stdout.split()
        print(f"  {out[0]:7s} {float(out[1]):8.3f} s")


if __name__ == "__main__":
    main()
