"""Multi-index helpers.

A multi-index is a plain tuple of non-negative ints, one slot per variable.
Tuples keep the sparse-dictionary keys hashable and cheap to compare.
"""

from __future__ import annotations

from itertools import product
from typing import Iterator, Tuple

Index = Tuple[int, ...]


def degree(idx: Index) -> int:
    return sum(idx)


def zeros(n: int) -> Index:
    return (0,) * n


def unit(n: int, i: int) -> Index:
    if not 0 <= i < n:
        raise IndexError(f"variable index {i} out of range for dimension {n}")
    return tuple(1 if j == i else 0 for j in range(n))


def add(a: Index, b: Index) -> Index:
    return tuple(x + y for x, y in zip(a, b))


def iter_indices(n: int, max_total: int) -> Iterator[Index]:
    """All multi-indices of dimension n with total degree <= max_total."""
    for idx in product(range(max_total + 1), repeat=n):
        if sum(idx) <= max_total:
            yield idx


def grlex_key(idx: Index) -> Tuple[int, Index]:
    """Graded lexicographic sort key: total degree first, then the tuple."""
    return (sum(idx), idx)
