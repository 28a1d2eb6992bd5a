"""Comparison maskers: MDAV microaggregation, additive noise and rank swapping,
plus the MaskSpec dispatcher shared with the tuning and CLI layers."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    ArrayLike,
    InvalidParameterError,
    as_array,
    check_seed,
    like,
    make_rng,
    rank_column,
)
from .shuffle import ShuffleVariant, sjppds


class Method(enum.Enum):
    SJPPDS_FULL = "sjppds-f"
    SJPPDS_SIMPLIFIED = "sjppds-s"
    MDAV = "mdav"
    NOISE_INDEPENDENT = "noise-ind"
    NOISE_CORRELATED = "noise-corr"
    RANK_SWAP = "rank-swap"

    @property
    def is_sjppds(self) -> bool:
        return self in (Method.SJPPDS_FULL, Method.SJPPDS_SIMPLIFIED)

    @property
    def is_deterministic(self) -> bool:
        return self is Method.MDAV


# Tuning grids used for the comparison experiments, 30 values each.
DEFAULT_GRIDS: dict[Method, list[float]] = {
    Method.SJPPDS_FULL: list(range(10, 301, 10)),
    Method.SJPPDS_SIMPLIFIED: list(range(10, 301, 10)),
    Method.MDAV: list(range(2, 32)),
    Method.NOISE_INDEPENDENT: list(range(1, 118, 4)),
    Method.NOISE_CORRELATED: list(range(1, 118, 4)),
    Method.RANK_SWAP: list(range(2, 61, 2)),
}


@dataclass(frozen=True)
class MaskSpec:
    method: Method
    param: float
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "seed", check_seed(self.seed))
        m, v = self.method, self.param
        if m.is_sjppds and (v != int(v) or v < 1):
            raise InvalidParameterError(f"{m.value}: n_c must be an integer >= 1, got {v}")
        if m is Method.MDAV and (v != int(v) or v < 2):
            raise InvalidParameterError(f"mdav: k must be an integer >= 2, got {v}")
        if m in (Method.NOISE_INDEPENDENT, Method.NOISE_CORRELATED) and not v >= 0:
            raise InvalidParameterError(f"{m.value}: noise percentage must be >= 0, got {v}")
        if m is Method.RANK_SWAP and not 0 <= v <= 100:
            raise InvalidParameterError(f"rank-swap: percentage must be in [0, 100], got {v}")

    def apply(self, data: ArrayLike) -> ArrayLike:
        return apply_mask(self, data)


def apply_mask(spec: MaskSpec, data: ArrayLike) -> ArrayLike:
    m = spec.method
    if m is Method.SJPPDS_FULL:
        return sjppds(data, int(spec.param), ShuffleVariant.FULL, spec.seed)
    if m is Method.SJPPDS_SIMPLIFIED:
        return sjppds(data, int(spec.param), ShuffleVariant.SIMPLIFIED, spec.seed)
    if m is Method.MDAV:
        return mdav_microaggregate(data, int(spec.param))
    if m is Method.NOISE_INDEPENDENT:
        return add_noise(data, spec.param, correlated=False, seed=spec.seed)
    if m is Method.NOISE_CORRELATED:
        return add_noise(data, spec.param, correlated=True, seed=spec.seed)
    return rank_swap(data, spec.param, spec.seed)


def _zscore(x: np.ndarray) -> np.ndarray:
    sd = x.std(axis=0, ddof=1)
    sd[sd == 0] = 1.0
    return (x - x.mean(axis=0)) / sd


def mdav_groups(data: ArrayLike, k: int) -> list[np.ndarray]:
    """MDAV partition of the rows into groups of size k..2k-1.

    Distances are Euclidean on z-scored columns. Ties in farthest/nearest
    searches go to the lowest row index.
    """
    x = as_array(data)
    n = x.shape[0]
    if int(k) != k or k < 2:
        raise InvalidParameterError(f"k must be an integer >= 2, got {k}")
    k = int(k)
    if n < 2 * k:
        raise InvalidParameterError(f"mdav needs n >= 2k, got n={n}, k={k}")
    z = _zscore(x)
    remaining = np.arange(n)
    groups: list[np.ndarray] = []

    def farthest_from(point: np.ndarray, pool: np.ndarray) -> int:
        d = ((z[pool] - point) ** 2).sum(axis=1)
        return int(pool[np.argmax(d)])

    def take_group(center: int, pool: np.ndarray) -> np.ndarray:
        d = ((z[pool] - z[center]) ** 2).sum(axis=1)
        order = np.lexsort((pool, d))
        return pool[order[:k]]

    def drop(pool: np.ndarray, rows: np.ndarray) -> np.ndarray:
        return pool[~np.isin(pool, rows)]

    while remaining.size >= 3 * k:
        centroid = z[remaining].mean(axis=0)
        r = farthest_from(centroid, remaining)
        g = take_group(r, remaining)
        groups.append(g)
        remaining = drop(remaining, g)
        s = farthest_from(z[r], remaining)
        g = take_group(s, remaining)
        groups.append(g)
        remaining = drop(remaining, g)
    if remaining.size >= 2 * k:
        centroid = z[remaining].mean(axis=0)
        r = farthest_from(centroid, remaining)
        g = take_group(r, remaining)
        groups.append(g)
        remaining = drop(remaining, g)
    groups.append(remaining)
    return groups


def mdav_microaggregate(data: ArrayLike, k: int) -> ArrayLike:
    """Replace each record by the per-column mean of its MDAV group."""
    x = as_array(data)
    out = np.empty_like(x)
    for g in mdav_groups(x, k):
        out[g] = x[g].mean(axis=0)
    return like(data, out)


def add_noise(data: ArrayLike, q: float, correlated: bool = False, seed: int = 0) -> ArrayLike:
    """Additive Gaussian noise whose variance is q percent of the data's.

    Independent noise draws column j from N(0, q/100 * var_j) on stream j.
    Correlated noise draws rows from N(0, q/100 * S), S the sample covariance.
    """
    if not q >= 0:
        raise InvalidParameterError(f"noise percentage must be >= 0, got {q}")
    x = as_array(data)
    n, p = x.shape
    if q == 0:
        return like(data, x.copy())
    scale = q / 100.0
    if not correlated:
        sd = np.sqrt(scale * x.var(axis=0, ddof=1))
        noise = np.column_stack([make_rng(seed, j).standard_normal(n) * sd[j] for j in range(p)])
        return like(data, x + noise)
    cov = np.atleast_2d(np.cov(x, rowvar=False)) * scale
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        eps = 1e-10 * np.trace(cov) / p
        warnings.warn(
            f"sample covariance is not positive definite; adding {eps:.3g} to its diagonal",
            RuntimeWarning,
            stacklevel=2,
        )
        chol = np.linalg.cholesky(cov + eps * np.eye(p))
    z = make_rng(seed).standard_normal((n, p))
    return like(data, x + z @ chol.T)


def rank_swap_column(
    values: np.ndarray, s: float, rng: np.random.Generator
) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Rank-swap one column; also returns the swapped (rank, rank) pairs, 1-based."""
    n = values.size
    window = int(np.floor(s * n / 100.0))
    out = values.copy()
    log: list[tuple[int, int]] = []
    if window == 0:
        return out, log
    ranks = rank_column(values, rng)
    by_rank = np.empty(n, dtype=np.int64)
    by_rank[ranks - 1] = np.arange(n)
    swapped = np.zeros(n, dtype=bool)
    for a in range(n):
        if swapped[a]:
            continue
        hi = min(n, a + window + 1)
        free = np.flatnonzero(~swapped[a + 1 : hi])
        if free.size == 0:
            continue
        b = a + 1 + int(free[rng.integers(free.size)])
        i, j = by_rank[a], by_rank[b]
        out[i], out[j] = values[j], values[i]
        swapped[a] = swapped[b] = True
        log.append((a + 1, b + 1))
    return out, log


def rank_swap(data: ArrayLike, s: float, seed: int = 0) -> ArrayLike:
    """Rank swapping with a window of floor(s*n/100) ranks; columns use independent streams."""
    if not 0 <= s <= 100:
        raise InvalidParameterError(f"swap percentage must be in [0, 100], got {s}")
    x = as_array(data)
    out = np.empty_like(x)
    for j in range(x.shape[1]):
        out[:, j], _ = rank_swap_column(x[:, j], s, make_rng(seed, j))
    return like(data, out)

