"""Homomorphisms between 2-step groups, given by images of base generators."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from nilspec.intlinalg import (IntMatrix, InvarianceError, NotUnimodularError, det,
                               integer_inverse, restricted_action, smith_normal_form)
from nilspec.twostep.group import (GroupElement, TwoStepGroup, commutator, multiply,
                                   power)


class RelationError(ValueError):
    """Generator images violate a defining relation of the source group."""


class EndoFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Hom:
    """A homomorphism ``source -> target``.

    ``A`` is the abelianized matrix (column i = base part of the image of
    ``a_i``) and ``C`` the induced matrix on central coordinates.
    """
    source: TwoStepGroup
    target: TwoStepGroup
    images: tuple[GroupElement, ...]
    A: IntMatrix
    C: IntMatrix

    @property
    def is_endo(self) -> bool:
        return self.source == self.target

    def apply(self, g: GroupElement) -> GroupElement:
        tgt = self.target
        self.source.check(g)
        out = tgt.identity()
        for img, e in zip(self.images, g.x):
            if e:
                out = multiply(tgt, out, power(tgt, img, e))
        cy = self.C.apply(g.y)
        return GroupElement(out.x, [a + b for a, b in zip(out.y, cy)])

    __call__ = apply

    def to_json(self) -> dict:
        return {"images": [g.to_json() for g in self.images]}

    def __repr__(self):
        return f"Hom(A={self.A.to_rows()}, C={self.C.to_rows()}, images={[g.to_json() for g in self.images]})"


Endo = Hom


def _lambda_right_inverse(grp: TwoStepGroup) -> list[list[Fraction]] | None:
    """Rational R with ``Lam @ R = I_m`` (Lam = matrix of all lam columns), or None."""
    cols = [v for _, v in grp._lambda_columns]
    if grp.m == 0:
        return []
    lam = IntMatrix.from_columns(cols, rows=grp.m)
    snf = smith_normal_form(lam)
    if snf.rank < grp.m:
        return None
    # Lam = U^-1 D V^-1  =>  R = V D^+ U
    p = lam.cols
    dplus = [[Fraction(0)] * grp.m for _ in range(p)]
    for i, d in enumerate(snf.diagonal):
        if i < grp.m:
            dplus[i][i] = Fraction(1, d)
    v = snf.V.to_rows()
    u = snf.U.to_rows()
    vd = [[sum(v[r][t] * dplus[t][c] for t in range(p)) for c in range(grp.m)] for r in range(p)]
    return [[sum(vd[r][t] * u[t][c] for t in range(grp.m)) for c in range(grp.m)] for r in range(p)]


_RINV_CACHE: dict = {}


def _right_inverse(grp: TwoStepGroup):
    key = (grp.n, grp.m, grp.terms)
    if key not in _RINV_CACHE:
        _RINV_CACHE[key] = _lambda_right_inverse(grp)
    return _RINV_CACHE[key]


def make_homomorphism(source: TwoStepGroup, target: TwoStepGroup,
                      images: Sequence[GroupElement]) -> Hom:
    images = tuple(images)
    if len(images) != source.n:
        raise ValueError(f"{len(images)} images for {source.n} generators")
    for img in images:
        target.check(img)
    pairs = source._lambda_columns
    comms = []
    for (j, i), lam in pairs:
        c = commutator(target, images[j], images[i])
        if not any(lam) and (any(c.x) or any(c.y)):
            raise RelationError(
                f"images of {source.labels[j]!r} and {source.labels[i]!r} do not commute")
        comms.append(c.y)
    cmat = _central_matrix(source, target, [lam for _, lam in pairs], comms)
    amat = IntMatrix.from_columns([g.x for g in images], rows=target.n)
    return Hom(source, target, images, amat, cmat)


def _central_matrix(source, target, lams, comms) -> IntMatrix:
    if source.m == 0:
        return IntMatrix.zeros(target.m, 0)
    rinv = _right_inverse(source)
    if rinv is None:
        raise ValueError("central generators are not all in the commutator subgroup; "
                         "their images are not determined by the base images")
    p = len(lams)
    rows = []
    for r in range(target.m):
        row = []
        for c in range(source.m):
            val = sum(comms[t][r] * rinv[t][c] for t in range(p))
            if val.denominator != 1:
                raise RelationError("commutator images do not extend to the central subgroup")
            row.append(int(val))
        rows.append(row)
    cmat = IntMatrix.from_rows(rows, source.m)
    for t, lam in enumerate(lams):
        if tuple(cmat.apply(lam)) != tuple(comms[t]):
            raise RelationError("commutator images are inconsistent with the structure constants")
    return cmat


def make_endomorphism(grp: TwoStepGroup, images: Sequence[GroupElement]) -> Hom:
    return make_homomorphism(grp, grp, images)


def identity_endo(grp: TwoStepGroup) -> Hom:
    return Hom(grp, grp, tuple(grp.generator(i) for i in range(grp.n)),
               IntMatrix.identity(grp.n), IntMatrix.identity(grp.m))


def zero_hom(source: TwoStepGroup, target: TwoStepGroup) -> Hom:
    return Hom(source, target, tuple(target.identity() for _ in range(source.n)),
               IntMatrix.zeros(target.n, source.n), IntMatrix.zeros(target.m, source.m))


def endo_from_matrix(grp: TwoStepGroup, a: IntMatrix | Sequence[Sequence[int]]) -> Hom:
    """Endomorphism sending ``a_i`` to ``a^(column i)`` with no central part."""
    a = a if isinstance(a, IntMatrix) else IntMatrix.from_rows(a)
    return make_endomorphism(grp, [GroupElement(a.col(i), (0,) * grp.m) for i in range(grp.n)])


def compose(phi: Hom, psi: Hom) -> Hom:
    """``phi o psi``."""
    if psi.target != phi.source:
        raise ValueError("cannot compose: target of the inner map is not the source of the outer")
    images = tuple(phi.apply(g) for g in psi.images)
    return Hom(psi.source, phi.target, images, phi.A @ psi.A, phi.C @ psi.C)


def center_matrix(grp: TwoStepGroup, phi: Hom) -> IntMatrix:
    """Matrix of ``phi`` restricted to Z(N) in the basis ``z_1..z_k, c_1..c_m``.

    Raises ``InvarianceError`` if phi does not map the center into itself.
    """
    ks = grp.center_directions
    # base directions must be preserved before center_coordinates is meaningful
    restricted_action(phi.A, ks)
    cols = []
    for kl in ks:
        img = phi.apply(GroupElement(kl, (0,) * grp.m))
        cols.append(grp.center_coordinates(img))
    for k in range(grp.m):
        img = phi.apply(grp.central_generator(k))
        cols.append(grp.center_coordinates(img))
    return IntMatrix.from_columns(cols, rows=len(ks) + grp.m)


def is_automorphism(grp: TwoStepGroup, phi: Hom) -> bool:
    """phi maps Z(N) onto Z(N); for these groups that already forces phi to be bijective."""
    if phi.source != grp or phi.target != grp:
        return False
    try:
        zmat = center_matrix(grp, phi)
    except InvarianceError:
        return False
    return abs(det(zmat)) == 1


def invert_automorphism(grp: TwoStepGroup, phi: Hom) -> Hom:
    if not is_automorphism(grp, phi):
        raise NotUnimodularError("not an automorphism")
    ainv = integer_inverse(phi.A)
    cinv = integer_inverse(phi.C)
    images = []
    for i in range(grp.n):
        x = ainv.col(i)
        f = phi.apply(GroupElement(x, (0,) * grp.m)).y
        v = cinv.apply(f)
        images.append(GroupElement(x, [-a for a in v]))
    return Hom(grp, grp, tuple(images), ainv, cinv)


def project_hom(phi: Hom, row: int, col: int) -> Hom:
    """Block ``pi_row o phi o e_col`` of a map between direct products."""
    src = phi.source.factor_slots[col]
    dst = phi.target.factor_slots[row]
    images = []
    for i in src.base_range:
        img = phi.images[i]
        images.append(GroupElement([img.x[t] for t in dst.base_range],
                                   [img.y[t] for t in dst.central_range]))
    a = IntMatrix.from_rows([[phi.A[r, c] for c in src.base_range] for r in dst.base_range],
                            cols=src.group.n)
    cm = IntMatrix.from_rows([[phi.C[r, c] for c in src.central_range] for r in dst.central_range],
                             cols=src.group.m)
    return Hom(src.group, dst.group, tuple(images), a, cm)


def parse_endo(grp: TwoStepGroup, text: str | dict) -> Hom:
    if isinstance(text, str):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise EndoFormatError(f"invalid JSON: {exc}") from None
    else:
        data = text
    if not isinstance(data, dict) or not isinstance(data.get("images"), list):
        raise EndoFormatError('endomorphism JSON must be an object with an "images" list')
    images = []
    for k, item in enumerate(data["images"]):
        if not isinstance(item, dict):
            raise EndoFormatError(f"images[{k}] is not an object")
        x, y = item.get("x", []), item.get("y", [0] * grp.m)
        if not (isinstance(x, list) and isinstance(y, list)):
            raise EndoFormatError(f"images[{k}]: x and y must be lists")
        try:
            x = [int(v) for v in x]
            y = [int(v) for v in y]
        except (TypeError, ValueError):
            raise EndoFormatError(f"images[{k}]: coordinates must be integers") from None
        if len(x) != grp.n or len(y) != grp.m:
            raise EndoFormatError(
                f"images[{k}]: expected {grp.n} base and {grp.m} central coordinates")
        images.append(GroupElement(x, y))
    if len(images) != grp.n:
        raise EndoFormatError(f"{len(images)} images for {grp.n} generators")
    return make_endomorphism(grp, images)
