"""Timing sweeps over n, p and n_c, with log-log slope fits."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .baselines import MaskSpec, Method, apply_mask
from .simulate import simulate_benchmark

# Masker settings for timing runs (n_c, k, noise %, swap %).
BENCH_PARAMS = {
    Method.SJPPDS_FULL: 100,
    Method.SJPPDS_SIMPLIFIED: 100,
    Method.MDAV: 7,
    Method.NOISE_INDEPENDENT: 100,
    Method.NOISE_CORRELATED: 100,
    Method.RANK_SWAP: 15,
}

SWEEPS = {
    "n": {"n": [10_000, 20_000, 40_000, 70_000, 100_000], "p": [10], "n_c": [100]},
    "p": {"n": [10_000], "p": [5, 10, 20, 30, 50], "n_c": [100]},
    "n_c": {"n": [10_000], "p": [10], "n_c": [100, 200, 400, 700, 1000]},
}

# Acceptable log-log slope ranges for SJPPDS-s, from its O(n (p^2 + n_c p)) cost.
SLOPE_RANGES = {"n": (0.8, 1.3), "p": (1.6, 2.4), "n_c": (0.7, 1.3)}


@dataclass
class Timing:
    method: str
    n: int
    p: int
    n_c: int
    param: float
    seconds: float
    repeats: int


def time_mask(spec: MaskSpec, data: np.ndarray, repeats: int = 3) -> float:
    """Median wall time of ``repeats`` masking runs."""
    times = []
    for r in range(repeats):
        spec_r = MaskSpec(spec.method, spec.param, spec.seed + r)
        t0 = time.perf_counter()
        apply_mask(spec_r, data)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def run_sweep(
    sweep: str | dict,
    methods: Iterable[Method] = (Method.SJPPDS_SIMPLIFIED,),
    repeats: int = 3,
    seed: int = 0,
) -> list[Timing]:
    """Time each method over the cartesian grid of a sweep definition."""
    grid = SWEEPS[sweep] if isinstance(sweep, str) else sweep
    rows = []
    for n in grid["n"]:
        for p in grid["p"]:
            data = np.asarray(simulate_benchmark(n, p, seed))
            for n_c in grid["n_c"]:
                for m in methods:
                    m = Method(m)
                    param = n_c if m.is_sjppds else BENCH_PARAMS[m]
                    secs = time_mask(MaskSpec(m, param, seed), data, repeats)
                    rows.append(Timing(m.value, n, p, n_c, float(param), secs, repeats))
    return rows


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log(y) on log(x)."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def sweep_slope(rows: Sequence[Timing], axis: str, method: str = "sjppds-s") -> float:
    pts = [(getattr(r, axis), r.seconds) for r in rows if r.method == method]
    xs, ys = zip(*pts)
    return loglog_slope(xs, ys)


def as_records(rows: Sequence[Timing]) -> list[dict]:
    return [asdict(r) for r in rows]
