"""Reidemeister numbers and an exact twisted-conjugacy decision procedure."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Sequence

from nilspec.intlinalg import (IntMatrix, cokernel_order, kernel_basis, quotient_action,
                               restricted_action, smith_normal_form, solve_integer)
from nilspec.spectrum import ExtNat, ext_mul
from nilspec.twostep.endo import Hom, center_matrix, is_automorphism
from nilspec.twostep.group import (GroupElement, TwoStepGroup, commutator, inverse,
                                   isolator_gamma2, multiply, multiply_all, power)


class DomainError(ValueError):
    """The map is not an automorphism."""


class SeriesInvarianceError(RuntimeError):
    pass


def abelian_reidemeister(m) -> ExtNat:
    """``|det(I - M)|``, or INF when it vanishes (any square integer matrix)."""
    m = m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m)
    return cokernel_order(IntMatrix.identity(m.rows) - m)


def _require_aut(grp: TwoStepGroup, phi: Hom):
    if not is_automorphism(grp, phi):
        raise DomainError("Reidemeister numbers are only computed for automorphisms")


def reidemeister(grp: TwoStepGroup, phi: Hom) -> ExtNat:
    """``R(phi) = R(phi_Z) * R(phi_bar)`` along ``1 < Z(N) < N``."""
    _require_aut(grp, phi)
    return _center_series(grp, phi)


def _center_series(grp: TwoStepGroup, phi: Hom) -> ExtNat:
    ks = grp.center_directions
    on_center = center_matrix(grp, phi)
    on_quotient = quotient_action(phi.A, ks)
    return ext_mul(abelian_reidemeister(on_center), abelian_reidemeister(on_quotient))


def _isolator_series(grp: TwoStepGroup, phi: Hom) -> ExtNat:
    iso = isolator_gamma2(grp)
    n, m = grp.n, grp.m
    try:
        on_iso = restricted_action(phi.C, iso)
        # N / isolator is abelian with coordinates (x, y mod iso); phi acts by [[A, 0], [Y, C]]
        rows = [list(phi.A.row(r)) + [0] * m for r in range(n)]
        rows += [[img.y[r] for img in phi.images] + list(phi.C.row(r)) for r in range(m)]
        full = IntMatrix.from_rows(rows, n + m)
        sub = [(0,) * n + tuple(v) for v in iso]
        on_quotient = quotient_action(full, sub)
    except ValueError as exc:
        raise SeriesInvarianceError(f"isolator series is not invariant: {exc}") from exc
    return ext_mul(abelian_reidemeister(on_iso), abelian_reidemeister(on_quotient))


def reidemeister_via_series(grp: TwoStepGroup, phi: Hom, series: str = "gamma2-isolator") -> ExtNat:
    _require_aut(grp, phi)
    if series == "center":
        return _center_series(grp, phi)
    if series == "gamma2-isolator":
        return _isolator_series(grp, phi)
    raise ValueError(f"unknown series {series!r}; use 'center' or 'gamma2-isolator'")


class TwistedConjugacy:
    """Decides ``x = z y phi(z)^-1`` exactly, with a witness z.

    The base layer is the lattice equation ``(I - A) u = x_bar - y_bar``.
    With ``u0`` a particular solution, every other z is ``a^u0 * t`` for t in
    the subgroup whose base part lies in ``ker(I - A)``; on that subgroup
    ``t y phi(t)^-1 = y [y, t^-1] kappa(t)^-1`` with ``kappa(t) = t^-1 phi(t)``
    a homomorphism into the central coordinates, so the central layer is a
    linear Diophantine system.
    """

    def __init__(self, grp: TwoStepGroup, phi: Hom):
        _require_aut(grp, phi)
        self.grp = grp
        self.phi = phi
        ia = IntMatrix.identity(grp.n) - phi.A
        self._ia = ia
        self._snf = smith_normal_form(ia)
        self._kernel = [GroupElement(w, (0,) * grp.m) for w in kernel_basis(ia)]
        self._kappa = [multiply(grp, inverse(grp, t), phi(t)).y for t in self._kernel]
        self._t_inv = [inverse(grp, t) for t in self._kernel]
        # columns for central unknowns v: -(C - I) e_j
        self._v_cols = [tuple(int(r == j) - phi.C[r, j] for r in range(grp.m)) for j in range(grp.m)]

    def _solve_base(self, rhs) -> tuple[int, ...] | None:
        snf = self._snf
        c = snf.U.apply(rhs)
        diag = snf.diagonal
        y = [0] * self.grp.n
        for i, ci in enumerate(c):
            d = diag[i] if i < len(diag) else 0
            if d == 0:
                if ci:
                    return None
            elif ci % d:
                return None
            else:
                y[i] = ci // d
        return snf.V.apply(y)

    def twisted(self, z: GroupElement, y: GroupElement) -> GroupElement:
        """``z y phi(z)^-1``."""
        grp = self.grp
        return multiply_all(grp, z, y, inverse(grp, self.phi(z)))

    def witness(self, x: GroupElement, y: GroupElement) -> GroupElement | None:
        grp = self.grp
        grp.check(x)
        grp.check(y)
        u0 = self._solve_base([a - b for a, b in zip(x.x, y.x)])
        if u0 is None:
            return None
        z0 = GroupElement(u0, (0,) * grp.m)
        xp = multiply_all(grp, inverse(grp, z0), x, self.phi(z0))
        if xp.x != y.x:
            raise AssertionError("base layer solution did not align base parts")
        cols = [tuple(a - b for a, b in zip(commutator(grp, y, ti).y, kap))
                for ti, kap in zip(self._t_inv, self._kappa)]
        cols += self._v_cols
        rhs = [a - b for a, b in zip(xp.y, y.y)]
        if grp.m == 0:
            sol = (0,) * len(cols)
        else:
            sol, _ = solve_integer(IntMatrix.from_columns(cols, rows=grp.m), rhs)
            if sol is None:
                return None
        s, v = sol[:len(self._kernel)], sol[len(self._kernel):]
        z = z0
        for t, si in zip(self._kernel, s):
            z = multiply(grp, z, power(grp, t, si))
        z = multiply(grp, z, GroupElement((0,) * grp.n, v))
        if self.twisted(z, y) != x:
            raise AssertionError("twisted-conjugacy witness failed verification")
        return z

    def conjugate(self, x: GroupElement, y: GroupElement) -> bool:
        return self.witness(x, y) is not None


def twisted_conjugate(grp: TwoStepGroup, phi: Hom, x: GroupElement, y: GroupElement):
    """Witness z with ``x = z y phi(z)^-1``, or the string ``"not conjugate"``."""
    z = TwistedConjugacy(grp, phi).witness(x, y)
    return "not conjugate" if z is None else z


@dataclass
class CensusResult:
    classes: int
    representatives: list[GroupElement]
    elements: int
    witnesses_verified: int = 0
    class_sizes: list[int] = field(default_factory=list)


def box_elements(grp: TwoStepGroup, radius: int) -> list[GroupElement]:
    rng = range(-radius, radius + 1)
    return [GroupElement(c[:grp.n], c[grp.n:]) for c in cartesian(rng, repeat=grp.n + grp.m)]


def census(grp: TwoStepGroup, phi: Hom, radius: int = 2) -> CensusResult:
    """Partition the coordinate box ``[-radius, radius]^(n+m)`` into twisted classes."""
    solver = TwistedConjugacy(grp, phi)
    reps: list[GroupElement] = []
    sizes: list[int] = []
    verified = 0
    elems = box_elements(grp, radius)
    for g in elems:
        for idx, r in enumerate(reps):
            if solver.witness(g, r) is not None:
                verified += 1
                sizes[idx] += 1
                break
        else:
            reps.append(g)
            sizes.append(1)
    return CensusResult(len(reps), reps, len(elems), verified, sizes)
