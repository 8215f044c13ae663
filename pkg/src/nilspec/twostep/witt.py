"""Witt's necklace formula for ranks of the free Lie ring."""
from __future__ import annotations

from sympy import divisors
from sympy.functions.combinatorial.numbers import mobius


def witt_rank(r: int, c: int) -> int:
    """Rank of the degree-c component of the free Lie ring on r generators.

    ``(1/c) * sum_{d | c} mu(d) r^(c/d)``; for c = 2 this is ``r(r-1)/2``.
    """
    if r < 1 or c < 1:
        raise ValueError("rank and degree must be positive")
    total = sum(int(mobius(d)) * r ** (c // d) for d in divisors(c))
    assert total % c == 0
    return total // c
