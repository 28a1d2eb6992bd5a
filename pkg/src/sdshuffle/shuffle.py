"""Joint-probability-preserving data shuffling (full and simplified) and the
sequential driver that applies it over rotated column orders."""

from __future__ import annotations

import enum

import numpy as np

from .core import (
    ArrayLike,
    CategoricalMatrix,
    InvalidInputError,
    InvalidParameterError,
    as_array,
    categorize_data,
    like,
    make_rng,
    shuffle_indices,
)

KEY_SEPARATOR = "."


class ShuffleVariant(enum.Enum):
    FULL = "full"
    SIMPLIFIED = "simplified"


def _check_pair(data: ArrayLike, cats: CategoricalMatrix) -> np.ndarray:
    x = as_array(data)
    if x.shape != cats.labels.shape:
        raise InvalidInputError(f"data shape {x.shape} != categories shape {cats.labels.shape}")
    if x.shape[1] < 2:
        raise InvalidInputError("shuffling needs at least 2 columns")
    return x


def combination_keys(labels: np.ndarray) -> list[str]:
    """One text key per row, the row's labels joined with ``KEY_SEPARATOR``."""
    return [KEY_SEPARATOR.join(map(str, row)) for row in labels.tolist()]


def group_rows(keys) -> dict:
    """Map each distinct key to its row indices, keys in order of first appearance."""
    groups: dict = {}
    for i, key in enumerate(keys):
        groups.setdefault(key, []).append(i)
    return groups


def jppds_full(
    data: ArrayLike,
    cats: CategoricalMatrix,
    rng: np.random.Generator,
    *,
    final_shuffle: bool = True,
) -> ArrayLike:
    """Full JPPDS: restricted permutations following the complete factorization.

    At step i (1-based, i < p) the first i columns move together as row
    fragments within each observed combination of the labels of columns
    i+1..p. The fragments are taken from the current shuffled state, so the
    permutations of earlier steps are carried along.
    """
    x = _check_pair(data, cats)
    p = x.shape[1]
    xs = x.copy()
    for i in range(1, p):
        groups = group_rows(combination_keys(cats.labels[:, i:]))
        for rows in groups.values():
            if len(rows) < 2:
                continue
            idx = np.asarray(rows)
            xs[idx, :i] = xs[shuffle_indices(idx, rng), :i]
    if final_shuffle:
        xs = xs[shuffle_indices(np.arange(x.shape[0]), rng)]
    return like(data, xs)


def jppds_simplified(
    data: ArrayLike,
    cats: CategoricalMatrix,
    rng: np.random.Generator,
    *,
    final_shuffle: bool = True,
) -> ArrayLike:
    """Simplified JPPDS: permute the first p-1 columns jointly within each level
    of the last column's labels."""
    x = _check_pair(data, cats)
    p = x.shape[1]
    xs = x.copy()
    last = cats.labels[:, p - 1]
    # labels are 1..n_c, so the observed levels come from a counting pass
    for level in np.flatnonzero(np.bincount(last)):
        idx = np.flatnonzero(last == level)
        if idx.size < 2:
            continue
        xs[idx, : p - 1] = x[shuffle_indices(idx, rng), : p - 1]
    if final_shuffle:
        xs = xs[shuffle_indices(np.arange(x.shape[0]), rng)]
    return like(data, xs)


def sjppds(
    data: ArrayLike,
    n_c: int,
    variant: ShuffleVariant | str = ShuffleVariant.SIMPLIFIED,
    seed: int = 0,
) -> ArrayLike:
    """Sequential JPPDS masking.

    Returns data of the same shape and column order in which every column is a
    permutation of the corresponding input column.
    """
    variant = ShuffleVariant(variant)
    if int(n_c) != n_c or n_c < 1:
        raise InvalidParameterError(f"n_c must be a positive integer, got {n_c}")
    x = as_array(data)
    p = x.shape[1]
    if p < 2:
        raise InvalidInputError("sjppds needs at least 2 columns")
    step = jppds_full if variant is ShuffleVariant.FULL else jppds_simplified
    rng = make_rng(seed)
    rotate = list(range(1, p)) + [0]

    xs = step(x, categorize_data(x, n_c), rng)
    for _ in range(p - 1):
        xs = xs[:, rotate]
        xs = step(xs, categorize_data(xs, n_c), rng)
    xs = np.ascontiguousarray(xs[:, rotate])
    return like(data, xs)
