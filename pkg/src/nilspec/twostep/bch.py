"""Rational completion: log coordinates and the truncated BCH product.

In class two ``exp(X) exp(Y) = exp(X + Y + [X, Y]/2)``; the bracket on the
base part is read off the structure constants and the central part is
inert.  With the commutator convention ``g^-1 h^-1 g h`` the group
commutator of ``exp(X), exp(Y)`` is ``exp([X, Y])``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from nilspec.twostep.group import GroupElement, TwoStepGroup

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class RationalPoint:
    w: tuple[Fraction, ...]
    u: tuple[Fraction, ...]

    def __init__(self, w: Sequence, u: Sequence):
        object.__setattr__(self, "w", tuple(Fraction(v) for v in w))
        object.__setattr__(self, "u", tuple(Fraction(v) for v in u))

    def scale(self, k) -> RationalPoint:
        k = Fraction(k)
        return RationalPoint([k * a for a in self.w], [k * a for a in self.u])


def lie_bracket(grp: TwoStepGroup, p: RationalPoint, q: RationalPoint) -> RationalPoint:
    out = [Fraction(0)] * grp.m
    for j, i, k, v in grp.terms:
        out[k] += v * (p.w[j] * q.w[i] - q.w[j] * p.w[i])
    return RationalPoint([0] * grp.n, out)


def bch_identity(grp: TwoStepGroup) -> RationalPoint:
    return RationalPoint([0] * grp.n, [0] * grp.m)


def bch_multiply(grp: TwoStepGroup, p: RationalPoint, q: RationalPoint) -> RationalPoint:
    br = lie_bracket(grp, p, q)
    return RationalPoint([a + b for a, b in zip(p.w, q.w)],
                         [a + b + HALF * c for a, b, c in zip(p.u, q.u, br.u)])


def bch_inverse(p: RationalPoint) -> RationalPoint:
    return p.scale(-1)


def bch_power(grp: TwoStepGroup, p: RationalPoint, k: int) -> RationalPoint:
    """k-fold BCH product (repeated multiplication, not the closed form)."""
    base = p if k >= 0 else bch_inverse(p)
    out = bch_identity(grp)
    for _ in range(abs(k)):
        out = bch_multiply(grp, out, base)
    return out


def bch_root(p: RationalPoint, k: int) -> RationalPoint:
    if k < 1:
        raise ValueError("root index must be positive")
    return p.scale(Fraction(1, k))


def log_coordinates(grp: TwoStepGroup, g: GroupElement) -> RationalPoint:
    """Closed form of ``log F(g)``: ``(x, y - q(x, x)/2)``."""
    grp.check(g)
    qxx = grp.q(g.x, g.x)
    return RationalPoint(g.x, [Fraction(b) - HALF * c for b, c in zip(g.y, qxx)])


def embed_F(grp: TwoStepGroup, g: GroupElement) -> RationalPoint:
    """Image of the normal form word under ``a_i -> exp(v_i)``, ``c_k -> exp(u_k)``.

    Computed as an explicit BCH product of the generator powers.
    """
    grp.check(g)
    out = bch_identity(grp)
    for i, e in enumerate(g.x):
        w = [0] * grp.n
        w[i] = e
        out = bch_multiply(grp, out, RationalPoint(w, [0] * grp.m))
    for k, e in enumerate(g.y):
        u = [0] * grp.m
        u[k] = e
        out = bch_multiply(grp, out, RationalPoint([0] * grp.n, u))
    return out
