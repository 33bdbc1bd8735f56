"""Benchmark: compiled vs pure-Python branch-and-bound kernel.

Usage: python3 benchmarks/bench_solver.py [--problems 2000] [--seed 7]

Generates randomized planning instances over the built-in 18-strategy
universe and times each available backend on the identical call sequence,
verifying the results agree along the way.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from politeplan._kernel import available_backends
from politeplan.lexicon import default_lexicon
from politeplan.perception import average_model


def make_problems(n_problems: int, seed: int):
    lex = default_lexicon()
    base = average_model()
    ids = list(lex.ids())
    n = len(ids)
    rng = np.random.default_rng(seed)
    problems = []
    for _ in range(n_problems):
        coeffs = [base.coefficients[s] + float(rng.normal(0, 0.15)) for s in ids]
        in_mask = 0
        for i in rng.choice(n, size=int(rng.integers(0, 6)), replace=False):
            in_mask |= 1 << int(i)
        free = []
        fixed_one = 0
        for i in range(n):
            r = rng.random()
            if r < 0.1:
                fixed_one |= 1 << i
            elif r < 0.3:
                pass  # forced zero
            else:
                free.append(i)
        target = float(rng.normal(0.0, 1.2))
        budget = int(rng.integers(-1, 5))
        problems.append((coeffs, in_mask, fixed_one, free, target, budget))
    return problems


def run(backend, problems):
    start = time.perf_counter()
    nodes = 0
    results = []
    for args in problems:
        mask, gap, n = backend(*args)
        nodes += n
        results.append((mask, gap))
    return time.perf_counter() - start, nodes, results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--problems", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    backends = available_backends()
    problems = make_problems(args.problems, args.seed)
    print(f"{args.problems} randomized 18-variable problems, backends: {', '.join(backends)}")

    timings = {}
    results = {}
    for name, solve in backends.items():
        run(solve, problems[: min(50, len(problems))])  # warm up
        elapsed, nodes, res = run(solve, problems)
        timings[name] = elapsed
        results[name] = res
        print(
            f"  {name:>8}: {elapsed:8.3f}s  "
            f"({args.problems / elapsed:9.1f} problems/s, {nodes / elapsed:12.0f} nodes/s)"
        )

    if "compiled" in results and "python" in results:
        mismatches = sum(1 for a, b in zip(results["compiled"], results["python"]) if a != b)
        print(f"  agreement: {args.problems - mismatches}/{args.problems} identical results")
        print(f"  speedup:   {timings['python'] / timings['compiled']:.1f}x compiled over python")


if __name__ == "__main__":
    main()
