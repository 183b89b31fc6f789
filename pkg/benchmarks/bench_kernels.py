"""Compiled vs numpy kernels: wall time and agreement.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from thermoform import kernels
from thermoform.potentials import symbol_potential
from thermoform.sft import validate
from thermoform.smooth import PerturbedMap, analyze
from thermoform.statistics import sample_birkhoff
from thermoform.transfer import build_operator, gibbs_weights, leading_triple


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_chain(name, repeat, n, trials):
    A = validate([[1, 1], [1, 0]])
    mu = gibbs_weights(leading_triple(build_operator(A, symbol_potential(A, [0.0, 0.0]), 2)))
    g = symbol_potential(A, [1.0, 0.0])
    return best_of(lambda: sample_birkhoff(mu, g, n, trials, seed=1, backend=name)[0], repeat)


def bench_lyapunov(name, repeat, steps, points):
    pm = PerturbedMap([[2, 1], [1, 1]], epsilon=0.01)
    d = analyze(pm.base)
    x0 = np.random.default_rng(0).random((points, 2))
    impl = kernels.backend(name)
    M = np.array(pm.base.matrix, dtype=float)
    return best_of(lambda: impl.lyapunov_sums(M, pm.kvec, pm.amp, pm.epsilon, x0, d.v_u, 0, steps), repeat)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        kernels.backend("cython")
        names = ["cython", "python"]
    except ImportError:
        print("compiled extension not built; timing the numpy fallback only")
        names = ["python"]

    cases = [
        ("chain sums", bench_chain, dict(n=2_000, trials=5_000)),
        ("lyapunov", bench_lyapunov, dict(steps=2_000, points=2_000)),
    ]
    print(f"{'kernel':<12} {'backend':<8} {'steps':>10} {'seconds':>9} {'Msteps/s':>9}")
    for label, fn, kw in cases:
        steps = math.prod(kw.values())
        results = {}
        for name in names:
            t, out = fn(name, args.repeat, **kw)
            results[name] = out
            print(f"{label:<12} {name:<8} {steps:>10} {t:>9.3f} {steps / t / 1e6:>9.1f}")
        if len(results) == 2:
            a, b = results["cython"], results["python"]
            line = f"{'':<12} bit-identical={np.array_equal(a, b)}"
            if label == "lyapunov":
                # last-ulp sin/cos differences decorrelate chaotic orbits; compare exponents
                ea, eb = a / kw["steps"], b / kw["steps"]
                line += (f" mean exponent {ea.mean():.6f} vs {eb.mean():.6f}"
                         f" (per-point max|diff| {float(np.max(np.abs(ea - eb))):.1e})")
            print(line)


if __name__ == "__main__":
    main()
