"""Data model, discretization, tie-broken ranking and the seeded RNG contract.

Every random draw in the package goes through :func:`make_rng`, which turns a
64-bit seed plus an optional tuple of stream keys into an independent
``numpy.random.Generator``. Two calls with the same seed and keys yield the
same stream, and distinct keys yield statistically independent streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

SEED_MAX = 2**64 - 1


class InvalidInputError(ValueError):
    """Raised when data does not satisfy an operation's shape or content contract."""


class InvalidParameterError(ValueError):
    """Raised when a tuning parameter is outside its admissible range."""


@dataclass(frozen=True)
class DataMatrix:
    """n x p numeric microdata with column names."""

    values: np.ndarray
    column_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise InvalidInputError(f"expected a 2-d array, got {values.ndim}-d")
        n, p = values.shape
        if n < 2 or p < 1:
            raise InvalidInputError(f"need n >= 2 and p >= 1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("data contains NaN or infinite values")
        names = tuple(self.column_names) or tuple(f"X{j + 1}" for j in range(p))
        if len(names) != p:
            raise InvalidInputError(f"{len(names)} column names for {p} columns")
        if len(set(names)) != p:
            raise InvalidInputError("column names must be unique")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def with_values(self, values: np.ndarray) -> "DataMatrix":
        return DataMatrix(values, self.column_names)


ArrayLike = Union[DataMatrix, np.ndarray]


def as_array(data: ArrayLike) -> np.ndarray:
    """Return the 2-d float array behind ``data`` (no copy for DataMatrix)."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2-d array, got {arr.ndim}-d")
    return arr


def like(template: ArrayLike, values: np.ndarray) -> ArrayLike:
    """Wrap ``values`` in the same container type as ``template``."""
    if isinstance(template, DataMatrix):
        return template.with_values(values)
    return values


@dataclass(frozen=True)
class CategoricalMatrix:
    """Integer labels in 1..n_c, one column per data column."""

    labels: np.ndarray
    n_c: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise InvalidParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the stream identified by ``(seed, *keys)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *keys: int) -> int:
    """A child 64-bit seed, reproducible from the parent seed and keys."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _bin_labels(x: np.ndarray, n_c: int) -> np.ndarray:
    """Equal-width labels for each column of a 2-d array."""
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    width = (hi - lo) / n_c
    ok = (hi > lo) & (width > 0) & np.isfinite(width)
    safe = np.where(ok, width, 1.0)
    scaled = np.floor((x - lo) / safe)
    # clamp: the maximum (and round-off just below it) must land in bin n_c
    np.clip(scaled, 0, n_c - 1, out=scaled)
    scaled[:, ~ok] = 0
    return scaled.astype(np.int64) + 1


def categorize_data(data: ArrayLike, n_c: int) -> CategoricalMatrix:
    """Equal-width discretization of every column into labels 1..n_c.

    Bins span [min, max] of each column with the last bin closed on the right;
    a constant column maps entirely to label 1.
    """
    if int(n_c) != n_c or n_c < 1:
        raise InvalidParameterError(f"n_c must be a positive integer, got {n_c}")
    return CategoricalMatrix(_bin_labels(as_array(data), int(n_c)), int(n_c))


def rank_column(values: Sequence[float], seed: int | np.random.Generator) -> np.ndarray:
    """Ascending ranks 1..n; tied values are ordered at random."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError("rank_column needs a non-empty 1-d vector")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    order = np.lexsort((rng.random(x.size), x))
    ranks = np.empty(x.size, dtype=np.int64)
    ranks[order] = np.arange(1, x.size + 1)
    return ranks


def rank_matrix(data: ArrayLike, seed: int, stream: int = 0) -> np.ndarray:
    """Column-wise :func:`rank_column`, column j drawing from stream ``(stream, j)``."""
    x = as_array(data)
    ranks = np.empty(x.shape, dtype=np.int64)
    for j in range(x.shape[1]):
        ranks[:, j] = rank_column(x[:, j], make_rng(seed, stream, j))
    return ranks


def shuffle_indices(indices: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    """Uniform random permutation of ``indices`` (numpy's Fisher-Yates shuffle)."""
    out = np.array(indices, copy=True)
    if out.size == 0:
        raise InvalidInputError("cannot shuffle an empty index vector")
    rng.shuffle(out)
    return out
