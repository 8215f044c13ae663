"""Reidemeister values and symbolic spectra.

A Reidemeister number is a positive integer or infinity (``INF``).  A
spectrum is a possibly infinite set of such values, so spectra are kept as
small expression trees and only ever queried: membership, or enumeration of
the members up to a bound.

Text syntax (whitespace-insensitive)::

    spec    := finite | "full" | "prod(" spec ("," spec)* ")"
             | "union(" spec ("," spec)* ")" | "pow(" spec "," int ")"
    finite  := "{" value ("," value)* "}"
    value   := positive integer | "inf"
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from sympy import divisors


class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("nilspec.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()

ExtNat = int | _Infinity


def check_extnat(a) -> ExtNat:
    if a is INF:
        return a
    if isinstance(a, bool) or not isinstance(a, int):
        raise TypeError(f"not an extended natural: {a!r}")
    if a < 1:
        raise ValueError(f"Reidemeister values are positive, got {a}")
    return a


def ext_mul(a: ExtNat, b: ExtNat) -> ExtNat:
    if a is INF or b is INF:
        return INF
    return a * b


def ext_to_json(a: ExtNat):
    return "inf" if a is INF else a


def ext_from_text(s) -> ExtNat:
    if isinstance(s, int) and not isinstance(s, bool):
        return check_extnat(s)
    s = str(s).strip().lower()
    if s in ("inf", "infinity", "∞"):
        return INF
    if not s.isdigit():
        raise ValueError(f"not a Reidemeister value: {s!r}")
    return check_extnat(int(s))


class SpectrumExpr:
    """Base of the expression nodes; instances are immutable and hashable."""

    def __contains__(self, m) -> bool:
        return spec_contains(self, m)

    def __mul__(self, other: SpectrumExpr) -> SpectrumExpr:
        return spec_product([self, other])

    def __or__(self, other: SpectrumExpr) -> SpectrumExpr:
        return spec_union([self, other])

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Finite(SpectrumExpr):
    values: frozenset

    def __init__(self, values: Iterable):
        vals = frozenset(check_extnat(v) for v in values)
        if not vals:
            raise ValueError("a finite spectrum must be non-empty")
        object.__setattr__(self, "values", vals)

    def __repr__(self):
        return f"Finite({_fmt_values(self.values)})"


@dataclass(frozen=True)
class Full(SpectrumExpr):
    """All positive integers together with infinity."""

    def __repr__(self):
        return "Full()"


@dataclass(frozen=True)
class Product(SpectrumExpr):
    children: tuple


@dataclass(frozen=True)
class Union(SpectrumExpr):
    children: tuple


@dataclass(frozen=True)
class Power(SpectrumExpr):
    base: SpectrumExpr
    n: int


FULL = Full()


def spec_product(specs: Iterable[SpectrumExpr]) -> SpectrumExpr:
    specs = list(specs)
    if not specs:
        raise ValueError("product of an empty list of spectra")
    flat = []
    for s in specs:
        if isinstance(s, Product):
            flat.extend(s.children)
        elif isinstance(s, Finite) and s.values == {1}:
            continue
        else:
            flat.append(s)
    if not flat:
        return Finite([1])
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(flat))


def spec_union(specs: Iterable[SpectrumExpr]) -> SpectrumExpr:
    specs = list(specs)
    if not specs:
        raise ValueError("union of an empty list of spectra")
    flat = []
    for s in specs:
        for c in (s.children if isinstance(s, Union) else (s,)):
            if c not in flat:
                flat.append(c)
    finite = [c for c in flat if isinstance(c, Finite)]
    if len(finite) > 1:
        merged = Finite(frozenset().union(*(c.values for c in finite)))
        flat = [merged] + [c for c in flat if not isinstance(c, Finite)]
    if len(flat) == 1:
        return flat[0]
    return Union(tuple(flat))


def spec_pow(a: SpectrumExpr, n: int) -> SpectrumExpr:
    if n < 1:
        raise ValueError(f"power exponent must be positive, got {n}")
    if n == 1:
        return a
    return Power(a, n)


def spec_union_fold(a: SpectrumExpr, n: int) -> SpectrumExpr:
    """``A^(1) | A^(2) | ... | A^(n)``."""
    if n < 1:
        raise ValueError(f"fold length must be positive, got {n}")
    return spec_union([spec_pow(a, i) for i in range(1, n + 1)])


def abelian_spectrum(rank: int) -> SpectrumExpr:
    """Spectrum of the free abelian group of the given rank."""
    if rank < 0:
        raise ValueError("negative rank")
    if rank == 0:
        return Finite([1])
    if rank == 1:
        return Finite([2, INF])
    return FULL


def _factors(a: SpectrumExpr) -> list[SpectrumExpr]:
    if isinstance(a, Product):
        return list(a.children)
    if isinstance(a, Power):
        return [a.base] * a.n
    return [a]


def has_infinity(a: SpectrumExpr) -> bool:
    if isinstance(a, Finite):
        return INF in a.values
    if isinstance(a, Full):
        return True
    if isinstance(a, Union):
        return any(has_infinity(c) for c in a.children)
    # every node is non-empty, so one infinite factor suffices
    return any(has_infinity(c) for c in _factors(a))


def spec_contains(a: SpectrumExpr, m) -> bool:
    m = check_extnat(m)
    if m is INF:
        return has_infinity(a)
    return _contains_finite(a, m)


@lru_cache(maxsize=65536)
def _contains_finite(a: SpectrumExpr, m: int) -> bool:
    if isinstance(a, Finite):
        return m in a.values
    if isinstance(a, Full):
        return True
    if isinstance(a, Union):
        return any(_contains_finite(c, m) for c in a.children)
    return _product_contains(tuple(_factors(a)), m)


@lru_cache(maxsize=65536)
def _product_contains(factors: tuple, m: int) -> bool:
    head, rest = factors[0], factors[1:]
    if not rest:
        return _contains_finite(head, m)
    for d in divisors(m):
        if _contains_finite(head, d) and _product_contains(rest, m // d):
            return True
    return False


def spec_enumerate(a: SpectrumExpr, bound: int) -> tuple[list[int], bool]:
    """Finite members ``<= bound`` in increasing order, and whether INF is a member."""
    if bound < 1:
        raise ValueError("enumeration bound must be positive")
    return sorted(_members_upto(a, bound)), has_infinity(a)


def _members_upto(a: SpectrumExpr, bound: int) -> set[int]:
    if isinstance(a, Finite):
        return {v for v in a.values if v is not INF and v <= bound}
    if isinstance(a, Full):
        return set(range(1, bound + 1))
    if isinstance(a, Union):
        return set().union(*(_members_upto(c, bound) for c in a.children))
    acc = {1}
    for f in _factors(a):
        fm = _members_upto(f, bound)
        acc = {x * y for x in acc for y in fm if x * y <= bound}
        if not acc:
            break
    return acc


def bounded_equal(a: SpectrumExpr, b: SpectrumExpr, bound: int = 1000) -> bool:
    """Semi-decision: agreement on all members up to ``bound`` and on INF."""
    return spec_enumerate(a, bound) == spec_enumerate(b, bound)


def _fmt_values(values) -> str:
    finite = sorted(v for v in values if v is not INF)
    parts = [str(v) for v in finite] + (["inf"] if INF in values else [])
    return "{" + ",".join(parts) + "}"


def to_text(a: SpectrumExpr) -> str:
    if isinstance(a, Finite):
        return _fmt_values(a.values)
    if isinstance(a, Full):
        return "full"
    if isinstance(a, Product):
        return "prod(" + ",".join(to_text(c) for c in a.children) + ")"
    if isinstance(a, Union):
        return "union(" + ",".join(to_text(c) for c in a.children) + ")"
    if isinstance(a, Power):
        return f"pow({to_text(a.base)},{a.n})"
    raise TypeError(f"not a spectrum expression: {a!r}")


_TOKEN = re.compile(r"\s*(?:(\d+)|(inf|full|prod|union|pow)|([{}(),]))", re.IGNORECASE)


class SpectrumSyntaxError(ValueError):
    pass


def parse_spectrum(text: str) -> SpectrumExpr:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise SpectrumSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        tokens.append((mt.group(1) or (mt.group(2) or "").lower() or mt.group(3), mt.start(0)))
        pos = mt.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    tokens.append(("", len(text)))
    i = 0

    def peek():
        return tokens[i][0]

    def expect(tok):
        nonlocal i
        if tokens[i][0] != tok:
            raise SpectrumSyntaxError(
                f"expected {tok!r} at offset {tokens[i][1]}, found {tokens[i][0] or 'end of input'!r}")
        i += 1

    def value():
        nonlocal i
        tok = peek()
        i += 1
        if tok == "inf":
            return INF
        if tok.isdigit():
            v = int(tok)
            if v < 1:
                raise SpectrumSyntaxError(f"value 0 at offset {tokens[i - 1][1]} is not a Reidemeister number")
            return v
        raise SpectrumSyntaxError(f"expected a value at offset {tokens[i - 1][1]}")

    def spec():
        nonlocal i
        tok = peek()
        if tok == "{":
            i += 1
            vals = [value()]
            while peek() == ",":
                i += 1
                vals.append(value())
            expect("}")
            return Finite(vals)
        if tok == "full":
            i += 1
            return FULL
        if tok in ("prod", "union"):
            i += 1
            expect("(")
            kids = [spec()]
            while peek() == ",":
                i += 1
                kids.append(spec())
            expect(")")
            return spec_product(kids) if tok == "prod" else spec_union(kids)
        if tok == "pow":
            i += 1
            expect("(")
            base = spec()
            expect(",")
            n = peek()
            if not n.isdigit():
                raise SpectrumSyntaxError(f"expected an exponent at offset {tokens[i][1]}")
            i += 1
            expect(")")
            try:
                return spec_pow(base, int(n))
            except ValueError as exc:
                raise SpectrumSyntaxError(str(exc)) from None
        raise SpectrumSyntaxError(f"unexpected {tok or 'end of input'!r} at offset {tokens[i][1]}")

    out = spec()
    if peek() != "":
        raise SpectrumSyntaxError(f"trailing input at offset {tokens[i][1]}")
    return out
