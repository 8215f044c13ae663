"""Finite quotients ``N / N(p)`` by reducing Malcev coordinates mod an odd prime."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from math import gcd, prod

from sympy import isprime

from nilspec.intlinalg import IntMatrix, smith_normal_form
from nilspec.twostep.endo import Hom
from nilspec.twostep.group import GroupElement, TwoStepGroup, inverse, multiply


@dataclass(frozen=True)
class FiniteQuotient:
    group: TwoStepGroup
    p: int

    @property
    def order(self) -> int:
        return self.p ** (self.group.n + self.group.m)

    def reduce(self, g: GroupElement) -> GroupElement:
        return GroupElement([a % self.p for a in g.x], [b % self.p for b in g.y])

    def elements(self):
        grp, p = self.group, self.p
        for c in cartesian(range(p), repeat=grp.n + grp.m):
            yield GroupElement(c[:grp.n], c[grp.n:])

    def index(self, g: GroupElement) -> int:
        out = 0
        for c in g.x + g.y:
            out = out * self.p + c % self.p
        return out

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return self.reduce(multiply(self.group, g, h))

    def inverse(self, g: GroupElement) -> GroupElement:
        return self.reduce(inverse(self.group, g))


def reduce_mod_p(grp: TwoStepGroup, p: int) -> FiniteQuotient:
    """Coordinates mod p with the same collection law.

    For odd p the elements with all coordinates divisible by p form a
    characteristic subgroup, so endomorphisms descend to the quotient.
    """
    if p == 2 or not isprime(p):
        raise ValueError(f"modulus must be an odd prime, got {p}")
    return FiniteQuotient(grp, p)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def brute_force_twisted_classes(handle: FiniteQuotient, phi: Hom) -> int:
    """Number of orbits of ``x -> z x phi(z)^-1`` on the finite quotient.

    Orbits of a group action are orbits of its generators, so only the
    generators ``a_i, c_k`` are applied to each element.
    """
    grp = handle.group
    if phi.source != grp or phi.target != grp:
        raise ValueError("map is not an endomorphism of this group")
    gens = [(g, handle.inverse(handle.reduce(phi(g)))) for g in grp.generators()]
    uf = _UnionFind(handle.order)
    for x in handle.elements():
        ix = handle.index(x)
        for g, phig_inv in gens:
            y = handle.multiply(handle.multiply(g, x), phig_inv)
            uf.union(ix, handle.index(y))
    return sum(1 for i in range(handle.order) if uf.find(i) == i)


def abelian_image_order(m: IntMatrix, modulus: int) -> int:
    """``|im(M)|`` for M acting on ``(Z/modulus)^r``, from the Smith form of M."""
    diag = smith_normal_form(m).diagonal
    return prod(modulus // gcd(d, modulus) for d in diag)
