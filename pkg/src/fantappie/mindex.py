"""Multi-index combinatorics.

A multi-index is a plain tuple of non-negative ints.  Everything here is exact
integer arithmetic; Python ints never overflow, so no promotion step is needed.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence

MultiIndex = tuple[int, ...]

__all__ = [
    "MultiIndex",
    "as_multi_index",
    "degree",
    "factorial",
    "enumerate_upto",
    "enumerate_degree",
    "multinomial_weight",
    "rising_product",
    "binom",
    "unit",
]


def as_multi_index(alpha: Iterable[int], dim: int | None = None) -> MultiIndex:
    """Validate and return ``alpha`` as a tuple of non-negative ints."""
    out = tuple(int(a) for a in alpha)
    if not out:
        raise ValueError("multi-index must have length >= 1")
    if any(a < 0 for a in out):
        raise ValueError(f"negative exponent in multi-index {out}")
    if dim is not None and len(out) != dim:
        raise ValueError(f"multi-index {out} has length {len(out)}, expected {dim}")
    return out


def degree(alpha: Sequence[int]) -> int:
    return sum(alpha)


def factorial(alpha: Sequence[int]) -> int:
    """``alpha! = alpha_1! ... alpha_n!``."""
    return math.prod(math.factorial(a) for a in alpha)


def unit(n: int, i: int) -> MultiIndex:
    """The multi-index ``e_i`` of length ``n``."""
    return tuple(1 if j == i else 0 for j in range(n))


@lru_cache(maxsize=None)
def enumerate_degree(n: int, d: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of length ``n`` and total degree exactly ``d``.

    Ordered lexicographically with larger leading exponents first, so for
    ``n=2, d=1`` the order is ``(1, 0), (0, 1)``.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if n == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in enumerate_degree(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_upto(n: int, D: int) -> list[MultiIndex]:
    """All multi-indices with ``|alpha| <= D`` in canonical order.

    Canonical order is by total degree, then as in :func:`enumerate_degree`.
    The count is ``C(D + n, n)``.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if D < 0:
        raise ValueError("degree cap must be >= 0")
    out: list[MultiIndex] = []
    for d in range(D + 1):
        out.extend(enumerate_degree(n, d))
    return out


def canonical_key(alpha: Sequence[int]) -> tuple:
    """Sort key realising the canonical (degree, descending-lex) order."""
    return (sum(alpha), tuple(-a for a in alpha))


def multinomial_weight(alpha: Sequence[int]) -> int:
    """``|alpha|! / alpha!``, the number of distinct words with letter counts alpha."""
    return math.factorial(degree(alpha)) // factorial(alpha)


def rising_product(d: int, k: int) -> int:
    """``(d+1)(d+2)...(d+k)``; the empty product (``k = 0``) is 1."""
    if k < 0:
        raise ValueError("length k must be >= 0")
    return math.prod(range(d + 1, d + k + 1))


def binom(a: int, b: int) -> int:
    if a < 0 or b < 0 or b > a:
        raise ValueError(f"binom requires 0 <= b <= a, got ({a}, {b})")
    return math.comb(a, b)
