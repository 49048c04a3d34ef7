#!/usr/bin/env python3
"""Benchmark the compiled moment kernel against the numpy fallback.

Times the hot inner loop of the stationarity optimizer (trial-state moments
via repeated structured application of the shifted Hamiltonian) and one full
end-to-end objective evaluation per backend.
"""

import argparse
import importlib
import time

import numpy as np

from rabi_texp import FockConfig, RabiParams, TrialKind, TrialSpec, trial_state
from rabi_texp import _kernels_py
from rabi_texp.moments import connected_from_raw, MomentSet
from rabi_texp.extrapolation import csm_estimate


def backends():
    found = {"python": _kernels_py}
    try:
        found["cython"] = importlib.import_module("rabi_texp._kernels_cy")
    except ImportError:
        pass
    return found


def time_call(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_moments(backend, psi, params, n_moments, inner, repeat):
    def run():
        for _ in range(inner):
            backend.raw_moments(
                params.omega0, params.omega, params.g, 0.1, psi, n_moments
            )

    return time_call(run, repeat) / inner


def objective_eval(backend, params, spec, cfg, n_moments):
    psi = trial_state(spec, cfg).coefficients
    mu1 = backend.raw_moments(
        params.omega0, params.omega, params.g, 0.0, psi, 1
    )[0]
    centered = backend.raw_moments(
        params.omega0, params.omega, params.g, mu1, psi, n_moments
    )
    moments = connected_from_raw(MomentSet(centered, shift=mu1))
    return csm_estimate(moments, n_moments).value


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    parser.add_argument("--inner", type=int, default=200)
    parser.add_argument("--orders", type=int, default=6)
    args = parser.parse_args()

    impls = backends()
    if "cython" not in impls:
        print("note: compiled backend not built; showing fallback only")

    params = RabiParams(1.0, 1.0, 2.0)
    print(f"{'n_max':>6} {'backend':>8} {'moments/us':>12} {'speedup':>8}")
    for n_max in (64, 256, 1024, 4096):
        cfg = FockConfig(n_max)
        x = min(3.0, np.sqrt(n_max) / 3)
        psi = trial_state(TrialSpec(TrialKind.POS_PARITY, x, -0.7), cfg).coefficients
        baseline = None
        for name, impl in impls.items():
            per_call = bench_moments(
                impl, psi, params, args.orders, args.inner, args.repeat
            )
            if name == "python":
                baseline = per_call
            speed = f"{baseline / per_call:8.1f}" if baseline else "     n/a"
            print(f"{n_max:>6} {name:>8} {per_call * 1e6:>12.2f} {speed}")

    spec = TrialSpec(TrialKind.POS_PARITY, 1.5, -0.8)
    cfg = FockConfig(64)
    print("\nfull objective evaluation (trial state + moments + CSM):")
    for name, impl in impls.items():
        values = [objective_eval(impl, params, spec, cfg, args.orders)]
        per_call = time_call(
            lambda: values.append(
                objective_eval(impl, params, spec, cfg, args.orders)
            ),
            args.repeat,
        )
        print(f"  {name:>8}: {per_call * 1e6:9.2f} us   E = {values[-1]:.12f}")


if __name__ == "__main__":
    main()
