"""Automorphisms of direct products as block matrices of homomorphisms.

Block ``(i, j)`` is a homomorphism ``N_j -> N_i``.  For non-abelian,
rationally indecomposable factors every automorphism has exactly one
isomorphism per row and column (at positions ``(i, sigma(i))``); every
other block lands in the center of its target and kills the center of its
source.  Dropping those off-blocks does not change the Reidemeister number.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from nilspec.graphs import is_rationally_indecomposable
from nilspec.intlinalg import det
from nilspec.spectrum import (ExtNat, Finite, SpectrumExpr, abelian_spectrum, ext_mul,
                              spec_product, spec_union_fold)
from nilspec.twostep import (GroupElement, Hom, TwoStepGroup, commutator, compose,
                             direct_product_group, hirsch_length, is_automorphism, is_central,
                             make_endomorphism, make_homomorphism, multiply, project_hom,
                             reidemeister, sample_automorphism, zero_hom)


class CommutingError(ValueError):
    def __init__(self, row, k, l, detail=""):
        super().__init__(f"images of blocks ({row},{k}) and ({row},{l}) do not commute{detail}")
        self.triple = (row, k, l)


class PreconditionError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    """Independent computations of the same quantity disagree (a bug trap)."""


@dataclass(frozen=True)
class BlockMap:
    factors: tuple[TwoStepGroup, ...]
    blocks: tuple[tuple[Hom, ...], ...]

    def __post_init__(self):
        k = len(self.factors)
        if len(self.blocks) != k or any(len(r) != k for r in self.blocks):
            raise ValueError(f"block grid must be {k}x{k}")
        for i, row in enumerate(self.blocks):
            for j, h in enumerate(row):
                if h.source != self.factors[j] or h.target != self.factors[i]:
                    raise ValueError(f"block ({i},{j}) must map factor {j} into factor {i}")

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def group(self) -> TwoStepGroup:
        return direct_product_group(self.factors)

    def block(self, i: int, j: int) -> Hom:
        return self.blocks[i][j]


def block_map(factors: Sequence[TwoStepGroup], blocks: dict | Sequence[Sequence]) -> BlockMap:
    """Build a BlockMap; missing or ``None`` blocks are zero maps, lists are image lists."""
    factors = tuple(factors)
    k = len(factors)
    grid = []
    for i in range(k):
        row = []
        for j in range(k):
            spec = blocks.get((i, j)) if isinstance(blocks, dict) else blocks[i][j]
            if spec is None or spec == "zero":
                row.append(zero_hom(factors[j], factors[i]))
            elif isinstance(spec, Hom):
                row.append(spec)
            else:
                row.append(make_homomorphism(factors[j], factors[i], spec))
        grid.append(tuple(row))
    return BlockMap(factors, tuple(grid))


def validate_block(b: BlockMap) -> Hom:
    """Check the commuting-image condition and assemble the endomorphism of the product."""
    for i in range(b.k):
        tgt = b.factors[i]
        for kk in range(b.k):
            for ll in range(kk + 1, b.k):
                for u in b.block(i, kk).images:
                    for w in b.block(i, ll).images:
                        c = commutator(tgt, u, w)
                        if any(c.x) or any(c.y):
                            raise CommutingError(i, kk, ll)
    prod_group = b.group
    images = []
    for j in range(b.k):
        for t in range(b.factors[j].n):
            x, y = [], []
            for i in range(b.k):
                img = b.block(i, j).images[t]
                x.extend(img.x)
                y.extend(img.y)
            images.append(GroupElement(x, y))
    phi = make_endomorphism(prod_group, images)
    for i in range(b.k):
        for j in range(b.k):
            if project_hom(phi, i, j).images != b.block(i, j).images:
                raise ConsistencyError(f"block ({i},{j}) does not round-trip through the assembly")
    return phi


def extract_blocks(phi: Hom) -> BlockMap:
    """Blocks ``pi_i o phi o e_j`` of an endomorphism of a direct product."""
    grp = phi.source
    k = len(grp.factors)
    return BlockMap(tuple(grp.factors),
                    tuple(tuple(project_hom(phi, i, j) for j in range(k)) for i in range(k)))


def block_product(b1: BlockMap, b2: BlockMap) -> BlockMap:
    """Monoid product: ``(b1 b2)_ij = sum_l b1_il o b2_lj`` with sum = pointwise product."""
    if b1.factors != b2.factors:
        raise ValueError("block maps over different factor lists")
    k = b1.k
    grid = []
    for i in range(k):
        tgt = b1.factors[i]
        row = []
        for j in range(k):
            images = []
            for t in range(b1.factors[j].n):
                acc = tgt.identity()
                for l in range(k):
                    acc = multiply(tgt, acc, b1.block(i, l).apply(b2.block(l, j).images[t]))
                images.append(acc)
            row.append(make_homomorphism(b1.factors[j], tgt, images))
        grid.append(tuple(row))
    return BlockMap(b1.factors, tuple(grid))


def is_isomorphism(h: Hom) -> bool:
    """Bijectivity for maps between groups whose central generators span the commutator subgroup."""
    s, t = h.source, h.target
    if s.n != t.n or s.m != t.m:
        return False
    return abs(det(h.A)) == 1 and abs(det(h.C)) == 1


def kills_center(h: Hom) -> bool:
    src = h.source
    elems = [GroupElement(kl, (0,) * src.m) for kl in src.center_directions]
    elems += [src.central_generator(k) for k in range(src.m)]
    for g in elems:
        img = h.apply(g)
        if any(img.x) or any(img.y):
            return False
    return True


@dataclass
class StructureReport:
    sigma: tuple[int | None, ...]
    iso_flags: tuple[bool, ...]
    central_flags: dict[tuple[int, int], bool] = field(default_factory=dict)
    center_kill_flags: dict[tuple[int, int], bool] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "iso_flags": list(self.iso_flags),
            "central_flags": {f"{i},{j}": v for (i, j), v in sorted(self.central_flags.items())},
            "center_kill_flags": {f"{i},{j}": v for (i, j), v in sorted(self.center_kill_flags.items())},
            "violations": list(self.violations),
        }


class TheoremViolation(AssertionError):
    def __init__(self, report: StructureReport):
        super().__init__("; ".join(report.violations))
        self.report = report


def check_factor_hypotheses(factors: Sequence[TwoStepGroup]):
    for idx, f in enumerate(factors):
        if f.is_abelian:
            raise PreconditionError(f"factor {idx} is abelian")
        if f.provenance is None:
            raise PreconditionError(
                f"factor {idx} has no defining graph; rational indecomposability cannot be checked")
        if not is_rationally_indecomposable(f.provenance):
            raise PreconditionError(f"factor {idx} is a simplicial join (rationally decomposable)")


def analyze_automorphism(b: BlockMap) -> StructureReport:
    """Locate the isomorphism blocks and check the centrality conditions on the rest.

    0-based indices: ``sigma[i] = j`` means block ``(i, j)`` is the isomorphism in row i.
    """
    check_factor_hypotheses(b.factors)
    phi = validate_block(b)
    if not is_automorphism(b.group, phi):
        raise PreconditionError("block map does not assemble to an automorphism")
    k = b.k
    sigma: list[int | None] = []
    iso_flags = []
    violations = []
    for i in range(k):
        hi = hirsch_length(b.factors[i])
        cands = [j for j in range(k)
                 if hirsch_length(b.factors[j]) == hi and is_isomorphism(b.block(i, j))]
        if len(cands) == 1:
            sigma.append(cands[0])
            iso_flags.append(True)
        else:
            sigma.append(None)
            iso_flags.append(False)
            violations.append(f"row {i} has {len(cands)} isomorphism blocks")
    if None not in sigma and len(set(sigma)) != k:
        violations.append(f"sigma {sigma} is not a bijection")
    report = StructureReport(tuple(sigma), tuple(iso_flags))
    for i in range(k):
        for j in range(k):
            if j == sigma[i]:
                continue
            h = b.block(i, j)
            report.central_flags[(i, j)] = all(is_central(b.factors[i], g) for g in h.images)
            report.center_kill_flags[(i, j)] = kills_center(h)
            if not report.central_flags[(i, j)]:
                violations.append(f"block ({i},{j}) is not central")
            if not report.center_kill_flags[(i, j)]:
                violations.append(f"block ({i},{j}) does not kill the center")
    report.violations = violations
    if violations:
        raise TheoremViolation(report)
    return report


def build_structured(factors: Sequence[TwoStepGroup], sigma: Sequence[int],
                     diagonal_isos: Sequence, off_blocks: dict | None = None) -> BlockMap:
    """Block map with isomorphisms at ``(i, sigma[i])`` and central maps elsewhere."""
    factors = tuple(factors)
    k = len(factors)
    if sorted(sigma) != list(range(k)):
        raise ValueError(f"sigma {list(sigma)} is not a permutation of 0..{k - 1}")
    grid: dict = {}
    for i in range(k):
        iso = diagonal_isos[i]
        if not isinstance(iso, Hom):
            iso = make_homomorphism(factors[sigma[i]], factors[i], iso)
        if iso.source != factors[sigma[i]] or iso.target != factors[i]:
            raise ValueError(f"diagonal map {i} must go from factor {sigma[i]} to factor {i}")
        if not is_isomorphism(iso):
            raise ValueError(f"diagonal map {i} is not an isomorphism")
        grid[(i, sigma[i])] = iso
    for (i, j), spec in (off_blocks or {}).items():
        if j == sigma[i]:
            raise ValueError(f"block ({i},{j}) is the isomorphism position")
        h = spec if isinstance(spec, Hom) else make_homomorphism(factors[j], factors[i], spec)
        for t, g in enumerate(h.images):
            if not is_central(factors[i], g):
                raise ValueError(f"block ({i},{j}): image of generator {t} is not central")
        grid[(i, j)] = h
    return block_map(factors, grid)


def diagonalize(b: BlockMap, report: StructureReport | None = None) -> BlockMap:
    report = report or analyze_automorphism(b)
    grid = {(i, report.sigma[i]): b.block(i, report.sigma[i]) for i in range(b.k)}
    return block_map(b.factors, grid)


def cycle_composites(b: BlockMap, sigma: Sequence[int]) -> list[tuple[list[int], Hom]]:
    """For each cycle of sigma, the composite of the isomorphism blocks around it."""
    seen = set()
    out = []
    for start in range(b.k):
        if start in seen:
            continue
        cycle = [start]
        comp = b.block(start, sigma[start])
        cur = sigma[start]
        while cur != start:
            cycle.append(cur)
            comp = compose(comp, b.block(cur, sigma[cur]))
            cur = sigma[cur]
        seen.update(cycle)
        out.append((cycle, comp))
    return out


def reidemeister_block_paths(b: BlockMap) -> dict[str, ExtNat]:
    """R of the assembled map, of its diagonalization, and as a product over cycles."""
    report = analyze_automorphism(b)
    phi = validate_block(b)
    direct = reidemeister(b.group, phi)
    diag = diagonalize(b, report)
    via_diag = reidemeister(diag.group, validate_block(diag))
    via_cycles: ExtNat = 1
    for cycle, comp in cycle_composites(b, report.sigma):
        r = reidemeister(b.factors[cycle[0]], comp)
        via_cycles = ext_mul(via_cycles, r)
    return {"assembled": direct, "diagonalized": via_diag, "cycles": via_cycles}


def reidemeister_block(b: BlockMap) -> ExtNat:
    paths = reidemeister_block_paths(b)
    vals = set(paths.values())
    if len(vals) != 1:
        raise ConsistencyError(f"Reidemeister computations disagree: {paths}")
    return paths["assembled"]


def group_multiplicities(groups: Sequence[TwoStepGroup]) -> list[tuple[TwoStepGroup, int]]:
    """Collapse equal factors into (group, multiplicity), keeping first-seen order.

    Only literally equal presentations are merged; isomorphism is not decided.
    """
    out: list[list] = []
    for g in groups:
        for entry in out:
            if entry[0] == g:
                entry[1] += 1
                break
        else:
            out.append([g, 1])
    return [(g, r) for g, r in out]


def spectrum_compose(factor_spectra: Sequence[tuple[SpectrumExpr, int]],
                     abelian_rank: int = 0) -> SpectrumExpr:
    """``SpecR(Z^r) * prod_i (S_i | S_i^(2) | ... | S_i^(r_i))``.

    Factors are assumed pairwise non-isomorphic and rationally indecomposable.
    """
    if abelian_rank < 0:
        raise ValueError("abelian rank must be non-negative")
    parts = []
    for s, mult in factor_spectra:
        if mult < 1:
            raise ValueError(f"multiplicity must be positive, got {mult}")
        parts.append(spec_union_fold(s, mult))
    if abelian_rank:
        parts.insert(0, abelian_spectrum(abelian_rank))
    if not parts:
        return Finite([1])
    return spec_product(parts)


def sample_automorphisms(grp: TwoStepGroup, trials: int, seed: int,
                         coeff_bound: int = 5) -> list[Hom]:
    """The automorphisms behind ``spectrum_sample``, in trial order."""
    rng = random.Random(seed)
    return [sample_automorphism(grp, rng.getrandbits(64), coeff_bound) for _ in range(trials)]


def spectrum_sample(grp: TwoStepGroup, trials: int, seed: int, coeff_bound: int = 5) -> Finite:
    """R-values of sampled automorphisms: a finite subset of the spectrum."""
    if trials < 1:
        raise ValueError("no data: at least one trial is needed")
    return Finite(reidemeister(grp, phi)
                  for phi in sample_automorphisms(grp, trials, seed, coeff_bound))
