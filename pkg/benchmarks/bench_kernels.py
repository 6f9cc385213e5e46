"""Time the iso-utility kernels on both lanes.

The package calls one merged kernel per proposal (project candidates onto
the target iso-utility surface, then pick a winner), so that is what gets
timed here, plus the projection step on its own. The numba lane is warmed
before timing; run with NEGOTEAM_NO_NUMBA=1 to confirm the fallback wiring
is what you think it is (this script imports both lanes directly, so the
flag does not change the numbers).

Usage: python3 benchmarks/bench_kernels.py [--candidates 500] [--repeats 7]
"""

import argparse
import statistics
import time

import numpy as np

from negoteam import _kernels
from negoteam.domain import hotel_booking

TARGETS = np.linspace(0.05, 0.95, 19)


def build_problem(candidate_count: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    profile = hotel_booking().team_profiles[0]
    cands = rng.random((candidate_count, profile.weights.size))
    refs = rng.random((2, profile.weights.size))
    return cands, profile.gradient, profile.offset, refs


def time_call(fn, args, calls: int, repeats: int) -> float:
    """Median seconds per call over `repeats` timed batches."""
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        for _ in range(calls):
            for target in TARGETS:
                fn(*args[:3], target, *args[4:])
        samples.append((time.perf_counter() - started) / (calls * TARGETS.size))
    return statistics.median(samples)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--candidates", type=int, default=500)
    parser.add_argument("--calls", type=int, default=20)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    cands, grad, offset, refs = build_problem(args.candidates)
    tol, max_iter = 1e-6, 10
    project_args = (cands, grad, offset, None, tol, max_iter)
    choose_args = (cands, grad, offset, None, tol, max_iter, refs)

    lanes = [
        ("numpy project", _kernels._project_iso_np, project_args),
        ("numpy choose", _kernels._choose_iso_np, choose_args),
    ]
    if _kernels.HAS_NUMBA:
        lanes += [
            ("numba project", _kernels._project_iso_nb, project_args),
            ("numba choose", _kernels._choose_iso_nb, choose_args),
        ]
        # trigger compilation outside the timed region
        _kernels._project_iso_nb(cands, grad, offset, 0.5, tol, max_iter)
        _kernels._choose_iso_nb(cands, grad, offset, 0.5, tol, max_iter, refs)
    else:
        print("numba unavailable, timing the numpy lane only")

    print(f"{args.candidates} candidates, {len(TARGETS)} targets per call\n")
    results = {}
    for label, fn, call_args in lanes:
        per_call = time_call(fn, call_args, args.calls, args.repeats)
        results[label] = per_call
        print(f"{label:>15}: {per_call * 1e6:8.1f} us/call")

    if _kernels.HAS_NUMBA:
        for step in ("project", "choose"):
            ratio = results[f"numpy {step}"] / results[f"numba {step}"]
            print(f"{step:>15}: numba is {ratio:.1f}x faster")


if __name__ == "__main__":
    main()
