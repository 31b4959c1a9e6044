"""Compare the compiled CPM kernel against the numpy fallback.

Times the Monte-Carlo batch pass on networks of increasing size and verifies
the two backends agree bit-for-bit on every run. Usage:

    python benchmarks/bench_kernel.py [--trials 20000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sitetwin import _kernel_numpy, kernel
from sitetwin.project_model import Activity, PrecedenceRelation, build_network
from sitetwin.rng import DOMAIN_DURATION, DOMAIN_GENERIC, SubStream, uniform_matrix


def layered_network(n_acts: int, n_rels: int, seed: int = 7):
    stream = SubStream(seed, DOMAIN_GENERIC, "bench")
    acts = [Activity(f"T{i:04d}", baseline_duration=float(1 + i % 9)) for i in range(n_acts)]
    seen = set()
    for i in range(1, n_acts):
        seen.add((int(stream.uniforms(1)[0] * i), i))
    while len(seen) < n_rels:
        u = stream.uniforms(4096).reshape(-1, 2)
        for a, b in u:
            i = int(a * (n_acts - 1))
            j = i + 1 + int(b * (n_acts - i - 1))
            if j < n_acts:
                seen.add((i, j))
            if len(seen) >= n_rels:
                break
    rels = [PrecedenceRelation(f"T{i:04d}", f"T{j:04d}") for i, j in sorted(seen)[:n_rels]]
    return build_network(acts, rels)


def bench(net, n_trials: int):
    n = len(net)
    arr = net.kernel_arrays()
    u = uniform_matrix(11, DOMAIN_DURATION, np.arange(n_trials, dtype=np.uint64), n)
    durations = 1.0 + 9.0 * u
    args = (
        arr["topo"], arr["in_off"], arr["in_pred"], arr["in_kind"], arr["in_lag"],
        arr["out_off"], arr["out_succ"], arr["out_kind"], arr["out_lag"],
    )
    results = {}
    for name, impl in (("compiled", kernel), ("numpy", _kernel_numpy)):
        if name == "compiled" and kernel.BACKEND != "cython":
            continue
        t0 = time.perf_counter()
        finishes, counts = impl.mcs_batch(*args, durations, 1e-9)
        results[name] = (time.perf_counter() - t0, finishes, counts)
    if "compiled" in results:
        assert np.array_equal(results["compiled"][1], results["numpy"][1]), "finish mismatch"
        assert np.array_equal(results["compiled"][2], results["numpy"][2]), "criticality mismatch"
    return {name: t for name, (t, _, _) in results.items()}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20_000)
    args = parser.parse_args()

    print(f"active backend: {kernel.BACKEND}")
    print(f"{'network':>22} {'trials':>8} {'compiled':>10} {'numpy':>10} {'speedup':>8}")
    for n_acts, n_rels in ((18, 21), (120, 340), (1186, 3452)):
        net = layered_network(n_acts, n_rels)
        trials = args.trials if n_acts < 500 else max(1000, args.trials // 10)
        times = bench(net, trials)
        compiled = times.get("compiled")
        ratio = f"{times['numpy'] / compiled:7.1f}x" if compiled else "     n/a"
        compiled_s = f"{compiled:9.3f}s" if compiled else "      n/a"
        print(
            f"{n_acts:>5} acts/{n_rels:>5} rels {trials:>8} {compiled_s} "
            f"{times['numpy']:9.3f}s {ratio}"
        )


if __name__ == "__main__":
    main()
