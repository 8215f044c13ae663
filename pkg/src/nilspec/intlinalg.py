"""Exact integer matrices: determinants, Smith normal form, lattices.

Every entry is a Python ``int``; nothing here ever touches floating point.
Matrices may have zero rows and/or columns.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from nilspec.spectrum import INF, ExtNat

Vector = tuple[int, ...]


class NotUnimodularError(ValueError):
    pass


class InvarianceError(ValueError):
    """The matrix does not map the given sublattice into itself."""


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix rows")
        return cls(len(rows), cols, tuple(int(v) for r in rows for v in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int | None = None) -> IntMatrix:
        columns = [tuple(c) for c in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        if any(len(c) != rows for c in columns):
            raise ValueError("ragged matrix columns")
        return cls(rows, len(columns),
                   tuple(int(columns[j][i]) for i in range(rows) for j in range(len(columns))))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows,
                         tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.extend(sum(a * b for a, b in zip(r, c)) for c in cols)
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise ValueError("vector length does not match matrix")
        return tuple(sum(a * b for a, b in zip(self.row(i), v)) for i in range(self.rows))

    def block(self, r0: int, r1: int, c0: int, c1: int) -> IntMatrix:
        return IntMatrix.from_rows([self.row(i)[c0:c1] for i in range(r0, r1)], cols=c1 - c0)

    def to_json(self) -> dict:
        return {"rows": self.to_rows()}

    def __repr__(self):
        return f"IntMatrix({self.to_rows()})"


def parse_matrix(text: str | dict) -> IntMatrix:
    """Read ``{"rows": [[...], ...]}``; entries may be ints or decimal strings."""
    data = json.loads(text) if isinstance(text, str) else text
    if not isinstance(data, dict) or "rows" not in data:
        raise ValueError('matrix JSON must be an object with a "rows" key')
    rows = data["rows"]
    if not isinstance(rows, list):
        raise ValueError('"rows" must be a list')
    out = []
    for i, r in enumerate(rows):
        if not isinstance(r, list):
            raise ValueError(f"rows[{i}] is not a list")
        row = []
        for j, v in enumerate(r):
            if isinstance(v, bool) or not isinstance(v, (int, str)):
                raise ValueError(f"rows[{i}][{j}] is not an integer")
            try:
                row.append(int(v))
            except ValueError:
                raise ValueError(f"rows[{i}][{j}] is not an integer: {v!r}") from None
        out.append(row)
    return IntMatrix.from_rows(out)


def _as_matrix(m) -> IntMatrix:
    return m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m)


def det(m) -> int:
    """Bareiss fraction-free elimination."""
    m = _as_matrix(m)
    if not m.is_square:
        raise ValueError(f"determinant of non-square {m.rows}x{m.cols} matrix")
    n = m.rows
    a = m.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SnfResult:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(m) -> SnfResult:
    """Return unimodular U, V with ``U @ M @ V == D`` in Smith form.

    Pivot rule: smallest nonzero absolute value among the remaining block,
    ties broken row-major. The output is therefore deterministic.
    """
    m = _as_matrix(m)
    nr, nc = m.rows, m.cols
    a = m.to_rows()
    u = IntMatrix.identity(nr).to_rows()
    v = IntMatrix.identity(nc).to_rows()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        ad, asrc = a[dst], a[src]
        for k in range(nc):
            ad[k] += q * asrc[k]
        ud, us = u[dst], u[src]
        for k in range(nr):
            ud[k] += q * us[k]

    def add_col(dst, src, q):
        for r in a:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    for t in range(min(nr, nc)):
        while True:
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, nr)
                        if any(a[i][j] % p for j in range(t + 1, nc))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return SnfResult(IntMatrix.from_rows(u, nr), IntMatrix.from_rows(a, nc), IntMatrix.from_rows(v, nc))


def cokernel_order(m) -> ExtNat:
    """Index of the image lattice ``M Z^n`` in ``Z^n``; ``INF`` if it has lower rank."""
    m = _as_matrix(m)
    if not m.is_square:
        raise ValueError(f"cokernel order of non-square {m.rows}x{m.cols} matrix")
    out = 1
    for d in smith_normal_form(m).diagonal:
        if d == 0:
            return INF
        out *= d
    return out


def hermite_basis(vectors: Iterable[Sequence[int]], dim: int | None = None) -> list[Vector]:
    """Row-style Hermite normal form of the lattice spanned by ``vectors``.

    Zero rows are dropped; pivots are positive and entries above each pivot
    are reduced into ``[0, pivot)``. Equal lattices give equal output.
    """
    rows = [list(v) for v in vectors]
    if dim is None:
        dim = len(rows[0]) if rows else 0
    if any(len(r) != dim for r in rows):
        raise ValueError("vectors of unequal dimension")
    out: list[list[int]] = []
    col = 0
    while rows and col < dim:
        rows = [r for r in rows if any(r)]
        while True:
            nz = [r for r in rows if r[col]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda r: abs(r[col]))
            for r in nz:
                if r is not piv:
                    q = r[col] // piv[col]
                    for k in range(col, dim):
                        r[k] -= q * piv[k]
        nz = [r for r in rows if r[col]]
        if nz:
            piv = nz[0]
            rows.remove(piv)
            if piv[col] < 0:
                piv = [-x for x in piv]
            for prev in out:
                q = prev[col] // piv[col]
                if q:
                    for k in range(col, dim):
                        prev[k] -= q * piv[k]
            out.append(piv)
        col += 1
    return [tuple(r) for r in out]


def kernel_basis(m) -> list[Vector]:
    """Saturated basis of ``{x : M x = 0}`` in Hermite form."""
    m = _as_matrix(m)
    snf = smith_normal_form(m)
    r = snf.rank
    cols = [snf.V.col(j) for j in range(r, m.cols)]
    return hermite_basis(cols, m.cols)


def saturation(vectors: Sequence[Sequence[int]], dim: int | None = None) -> list[Vector]:
    """Basis of ``(span B (x) Q) cap Z^n``, the smallest saturated lattice containing B."""
    vectors = [tuple(v) for v in vectors]
    if dim is None:
        if not vectors:
            return []
        dim = len(vectors[0])
    if any(len(v) != dim for v in vectors):
        raise ValueError("vectors of unequal dimension")
    if not vectors:
        return []
    annihilator = kernel_basis(IntMatrix.from_rows(vectors, dim))
    return kernel_basis(IntMatrix.from_rows(annihilator, dim))


def integer_inverse(m) -> IntMatrix:
    m = _as_matrix(m)
    if not m.is_square:
        raise ValueError("inverse of a non-square matrix")
    d = det(m)
    if abs(d) != 1:
        raise NotUnimodularError(f"determinant {d} is not a unit")
    snf = smith_normal_form(m)
    # U M V = I  =>  M^-1 = V U
    return snf.V @ snf.U


def solve_integer(m, b: Sequence[int]) -> tuple[Vector | None, list[Vector]]:
    """Integer solutions of ``M x = b``: a particular solution (or None) and a kernel basis."""
    m = _as_matrix(m)
    if len(b) != m.rows:
        raise ValueError("right-hand side length does not match matrix")
    snf = smith_normal_form(m)
    c = snf.U.apply(b)
    diag = snf.diagonal
    y = [0] * m.cols
    for i, ci in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ci != 0:
                return None, kernel_basis(m)
        elif ci % d:
            return None, kernel_basis(m)
        else:
            y[i] = ci // d
    return snf.V.apply(y), kernel_basis(m)


def _complement_basis(k: Sequence[Sequence[int]], n: int) -> IntMatrix:
    """Unimodular P whose first len(K) columns are the (saturated) basis K."""
    kmat = IntMatrix.from_columns(k, rows=n)
    snf = smith_normal_form(kmat)
    if any(d != 1 for d in snf.diagonal) or snf.rank != len(k):
        raise ValueError("sublattice basis is not saturated and independent")
    uinv = integer_inverse(snf.U)
    cols = [tuple(c) for c in k] + [uinv.col(j) for j in range(len(k), n)]
    return IntMatrix.from_columns(cols, rows=n)


def _adapted(m: IntMatrix, k: Sequence[Sequence[int]]) -> tuple[IntMatrix, int]:
    if not m.is_square:
        raise ValueError("action matrix must be square")
    n = m.rows
    if any(len(v) != n for v in k):
        raise ValueError("sublattice vectors have the wrong dimension")
    p = _complement_basis(k, n)
    conj = integer_inverse(p) @ m @ p
    r = len(k)
    if any(conj[i, j] for i in range(r, n) for j in range(r)):
        raise InvarianceError("matrix does not preserve the sublattice")
    return conj, r


def quotient_action(m, k: Sequence[Sequence[int]]) -> IntMatrix:
    """Matrix of the map induced by M on ``Z^n / span K`` (K saturated)."""
    conj, r = _adapted(_as_matrix(m), k)
    return conj.block(r, conj.rows, r, conj.cols)


def restricted_action(m, k: Sequence[Sequence[int]]) -> IntMatrix:
    """Matrix of M restricted to ``span K``, in the basis K."""
    conj, r = _adapted(_as_matrix(m), k)
    return conj.block(0, r, 0, r)
