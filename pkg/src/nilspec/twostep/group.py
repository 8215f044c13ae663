"""2-step nilpotent groups in Malcev coordinates.

An element is stored in normal form ``a_1^x_1 ... a_n^x_n c_1^y_1 ... c_m^y_m``
with the ``c_k`` central.  Structure constants are integer vectors
``lam(j, i)`` (``j > i``) giving ``[a_j, a_i] = c^lam(j, i)`` where
``[g, h] = g^-1 h^-1 g h``.  Collecting ``g * h`` moves every letter of
``h``'s base part left past the larger-index letters of ``g``, so

    (x, y) * (x', y') = (x + x', y + y' + q(x, x')),
    q_k(x, x') = sum_{j > i} lam_k(j, i) x_j x'_i.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

from nilspec.graphs import Graph, join
from nilspec.intlinalg import (IntMatrix, Vector, hermite_basis, kernel_basis,
                               saturation, solve_integer)


@dataclass(frozen=True)
class GroupElement:
    x: Vector
    y: Vector

    def __init__(self, x: Sequence[int], y: Sequence[int] = ()):
        object.__setattr__(self, "x", tuple(int(v) for v in x))
        object.__setattr__(self, "y", tuple(int(v) for v in y))

    def to_json(self) -> dict:
        return {"x": list(self.x), "y": list(self.y)}

    @classmethod
    def from_json(cls, data: dict) -> GroupElement:
        return cls(data.get("x", []), data.get("y", []))


@dataclass(frozen=True)
class FactorSlot:
    group: "TwoStepGroup"
    n_offset: int
    m_offset: int

    @property
    def base_range(self) -> range:
        return range(self.n_offset, self.n_offset + self.group.n)

    @property
    def central_range(self) -> range:
        return range(self.m_offset, self.m_offset + self.group.m)


@dataclass(frozen=True)
class TwoStepGroup:
    n: int
    m: int
    # sparse structure constants: (j, i, k, value) with j > i, value != 0
    terms: tuple[tuple[int, int, int, int], ...]
    labels: tuple[str, ...]
    provenance: Graph | None = field(default=None, compare=False)
    components: tuple["TwoStepGroup", ...] = field(default=(), compare=False)

    @classmethod
    def from_pairing(cls, n: int, m: int, pairing: dict[tuple[int, int], Sequence[int]],
                     labels: Sequence[str] | None = None) -> TwoStepGroup:
        terms = []
        for (j, i), vec in sorted(pairing.items()):
            if not 0 <= i < j < n:
                raise ValueError(f"pairing key {(j, i)} must satisfy 0 <= i < j < n")
            if len(vec) != m:
                raise ValueError(f"pairing vector for {(j, i)} has length {len(vec)}, expected {m}")
            terms.extend((j, i, k, int(v)) for k, v in enumerate(vec) if v)
        if labels is None:
            labels = [f"a{i + 1}" for i in range(n)]
        return cls(n, m, tuple(sorted(terms)), tuple(labels))

    def pairing(self, j: int, i: int) -> Vector:
        """``lam(j, i)``, extended antisymmetrically to all index pairs."""
        out = [0] * self.m
        sign = 1
        if j < i:
            j, i, sign = i, j, -1
        for jj, ii, k, v in self.terms:
            if jj == j and ii == i:
                out[k] += sign * v
        return tuple(out)

    @property
    def is_abelian(self) -> bool:
        return not self.terms

    @property
    def factors(self) -> tuple[TwoStepGroup, ...]:
        return self.components or (self,)

    @cached_property
    def factor_slots(self) -> tuple[FactorSlot, ...]:
        slots, no, mo = [], 0, 0
        for g in self.factors:
            slots.append(FactorSlot(g, no, mo))
            no += g.n
            mo += g.m
        return tuple(slots)

    def identity(self) -> GroupElement:
        return GroupElement((0,) * self.n, (0,) * self.m)

    def generator(self, i: int) -> GroupElement:
        x = [0] * self.n
        x[i] = 1
        return GroupElement(x, (0,) * self.m)

    def central_generator(self, k: int) -> GroupElement:
        y = [0] * self.m
        y[k] = 1
        return GroupElement((0,) * self.n, y)

    def generators(self) -> list[GroupElement]:
        return ([self.generator(i) for i in range(self.n)]
                + [self.central_generator(k) for k in range(self.m)])

    def q(self, x: Sequence[int], xp: Sequence[int]) -> list[int]:
        out = [0] * self.m
        for j, i, k, v in self.terms:
            out[k] += v * x[j] * xp[i]
        return out

    def bracket(self, x: Sequence[int], xp: Sequence[int]) -> list[int]:
        """Central part of the commutator of two elements with base parts x, x'."""
        out = [0] * self.m
        for j, i, k, v in self.terms:
            out[k] += v * (x[j] * xp[i] - xp[j] * x[i])
        return out

    def check(self, g: GroupElement) -> GroupElement:
        if len(g.x) != self.n or len(g.y) != self.m:
            raise ValueError(
                f"element with {len(g.x)}+{len(g.y)} coordinates in a group with {self.n}+{self.m}")
        return g

    @cached_property
    def _lambda_columns(self) -> list[tuple[tuple[int, int], Vector]]:
        return [((j, i), self.pairing(j, i)) for i, j in combinations(range(self.n), 2)]

    @cached_property
    def center_directions(self) -> list[Vector]:
        rows = []
        for k in range(self.m):
            for r in range(self.n):
                row = [0] * self.n
                for j, i, kk, v in self.terms:
                    if kk != k:
                        continue
                    if j == r:
                        row[i] += v
                    if i == r:
                        row[j] -= v
                rows.append(row)
        if not rows:
            return [tuple(int(a == b) for b in range(self.n)) for a in range(self.n)]
        return kernel_basis(IntMatrix.from_rows(rows, self.n))

    def center_coordinates(self, g: GroupElement) -> Vector:
        """Coordinates of a central element in the basis ``z_1..z_k, c_1..c_m``.

        ``z_l`` is the normal-form element with base part ``K_l`` and no central part.
        """
        ks = self.center_directions
        t, _ = solve_integer(IntMatrix.from_columns(ks, rows=self.n), g.x)
        if t is None:
            raise ValueError("element is not central")
        p = self.identity()
        for tl, kl in zip(t, ks):
            p = multiply(self, p, power(self, GroupElement(kl, (0,) * self.m), tl))
        return tuple(t) + tuple(a - b for a, b in zip(g.y, p.y))

    def center_element(self, coords: Sequence[int]) -> GroupElement:
        ks = self.center_directions
        p = self.identity()
        for tl, kl in zip(coords, ks):
            p = multiply(self, p, power(self, GroupElement(kl, (0,) * self.m), tl))
        return multiply(self, p, GroupElement((0,) * self.n, coords[len(ks):]))

    def random_element(self, rng: random.Random, bound: int = 5) -> GroupElement:
        return GroupElement([rng.randint(-bound, bound) for _ in range(self.n)],
                            [rng.randint(-bound, bound) for _ in range(self.m)])

    def describe(self) -> dict:
        out = {"n": self.n, "m": self.m, "labels": list(self.labels),
               "hirsch_length": hirsch_length(self),
               "center_rank": len(self.center_directions) + self.m,
               "factors": len(self.factors)}
        if self.provenance is not None:
            out["graph"] = self.provenance.to_json()
        return out


def build_graph_group(g: Graph) -> TwoStepGroup:
    """``A_G / gamma_3(A_G)``: one central generator per non-edge, in lexicographic order."""
    nonedges = g.non_edges()
    pairing = {}
    for k, (i, j) in enumerate(nonedges):
        vec = [0] * len(nonedges)
        vec[k] = 1
        pairing[(j, i)] = vec
    grp = TwoStepGroup.from_pairing(len(g.vertices), len(nonedges), pairing, g.vertices)
    return TwoStepGroup(grp.n, grp.m, grp.terms, grp.labels, provenance=g)


def direct_product_group(groups: Sequence[TwoStepGroup]) -> TwoStepGroup:
    groups = [f for g in groups for f in g.factors]
    if not groups:
        raise ValueError("direct product of no groups")
    if len(groups) == 1:
        return groups[0]
    width = len(str(len(groups) - 1))
    terms, labels = [], []
    no = mo = 0
    for idx, g in enumerate(groups):
        terms.extend((j + no, i + no, k + mo, v) for j, i, k, v in g.terms)
        labels.extend(f"{idx:0{width}d}:{lab}" for lab in g.labels)
        no += g.n
        mo += g.m
    prov = None
    if all(g.provenance is not None for g in groups):
        prov = join(*(g.provenance.relabel({v: f"{idx:0{width}d}:{v}" for v in g.provenance.vertices})
                      for idx, g in enumerate(groups)))
    return TwoStepGroup(no, mo, tuple(sorted(terms)), tuple(labels),
                        provenance=prov, components=tuple(groups))


def multiply(grp: TwoStepGroup, g: GroupElement, h: GroupElement) -> GroupElement:
    grp.check(g)
    grp.check(h)
    corr = grp.q(g.x, h.x)
    return GroupElement([a + b for a, b in zip(g.x, h.x)],
                        [a + b + c for a, b, c in zip(g.y, h.y, corr)])


def multiply_all(grp: TwoStepGroup, *elements: GroupElement) -> GroupElement:
    out = grp.identity()
    for e in elements:
        out = multiply(grp, out, e)
    return out


def inverse(grp: TwoStepGroup, g: GroupElement) -> GroupElement:
    grp.check(g)
    corr = grp.q(g.x, g.x)
    return GroupElement([-a for a in g.x], [c - b for b, c in zip(g.y, corr)])


def power(grp: TwoStepGroup, g: GroupElement, k: int) -> GroupElement:
    """``g^k`` for any integer k: ``(k x, k y + C(k, 2) q(x, x))``."""
    grp.check(g)
    corr = grp.q(g.x, g.x)
    tri = k * (k - 1) // 2
    return GroupElement([k * a for a in g.x], [k * b + tri * c for b, c in zip(g.y, corr)])


def commutator(grp: TwoStepGroup, g: GroupElement, h: GroupElement) -> GroupElement:
    """``g^-1 h^-1 g h``, computed by collection."""
    return multiply_all(grp, inverse(grp, g), inverse(grp, h), g, h)


def is_central(grp: TwoStepGroup, g: GroupElement) -> bool:
    grp.check(g)
    return all(not any(grp.bracket(g.x, grp.generator(i).x)) for i in range(grp.n))


def center_basis(grp: TwoStepGroup) -> list[Vector]:
    """Base directions K of the center; ``Z(N) = {(x, y) : x in span K}``."""
    return list(grp.center_directions)


def gamma2_basis(grp: TwoStepGroup) -> list[Vector]:
    """Hermite basis of the lattice spanned by all ``lam(j, i)`` inside ``Z^m``."""
    return hermite_basis([v for _, v in grp._lambda_columns if any(v)], grp.m)


def isolator_gamma2(grp: TwoStepGroup) -> list[Vector]:
    """Central coordinates of the isolator of the commutator subgroup."""
    return saturation(gamma2_basis(grp), grp.m)


def hirsch_length(grp: TwoStepGroup) -> int:
    return grp.n + grp.m
