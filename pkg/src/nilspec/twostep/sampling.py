"""Random automorphisms of graph groups as words in elementary automorphisms."""
from __future__ import annotations

import random

from nilspec.graphs import graph_automorphisms
from nilspec.twostep.endo import (Hom, compose, identity_endo, is_automorphism,
                                  make_endomorphism)
from nilspec.twostep.group import GroupElement, TwoStepGroup, inverse, multiply

MOVES = ("permute", "invert", "transvect", "twist")


def elementary_automorphisms(grp: TwoStepGroup):
    """(kind, data) pairs describing the moves available for this graph."""
    g = grp.provenance
    if g is None:
        raise ValueError("automorphism sampling needs a group built from a graph")
    verts = g.vertices
    transvections = [(v, w) for v in range(len(verts)) for w in range(len(verts))
                     if v != w and g.link(verts[v]) <= g.star(verts[w])]
    perms = [p for p in graph_automorphisms(g) if list(p) != list(range(len(verts)))]
    return perms, transvections


def _permutation(grp: TwoStepGroup, perm) -> Hom:
    return make_endomorphism(grp, [grp.generator(perm[i]) for i in range(grp.n)])


def _replace(grp: TwoStepGroup, v: int, image: GroupElement) -> Hom:
    images = [grp.generator(i) for i in range(grp.n)]
    images[v] = image
    return make_endomorphism(grp, images)


def sample_automorphism(grp: TwoStepGroup, seed: int, size_bound: int = 5) -> Hom:
    """Deterministic random automorphism for the given seed.

    A word of length ``1..2*size_bound`` in graph symmetries, inversions
    ``a_v -> a_v^-1``, transvections ``a_v -> a_v a_w^(+-1)`` (allowed when
    ``link(v)`` lies in ``star(w)``) and central twists ``a_v -> a_v z`` with
    z central, coefficients bounded by ``size_bound``.  The result generates
    only part of Aut(N) in general.
    """
    rng = random.Random(seed)
    perms, transvections = elementary_automorphisms(grp)
    ks = grp.center_directions
    phi = identity_endo(grp)
    if grp.n == 0:
        return phi
    length = rng.randint(1, 2 * size_bound)
    done = 0
    attempts = 0
    while done < length and attempts < 20 * length:
        attempts += 1
        move = rng.choice(MOVES)
        if move == "permute":
            if not perms:
                continue
            step = _permutation(grp, rng.choice(perms))
        elif move == "invert":
            v = rng.randrange(grp.n)
            step = _replace(grp, v, inverse(grp, grp.generator(v)))
        elif move == "transvect":
            if not transvections:
                continue
            v, w = rng.choice(transvections)
            wgen = grp.generator(w)
            if rng.random() < 0.5:
                wgen = inverse(grp, wgen)
            step = _replace(grp, v, multiply(grp, grp.generator(v), wgen))
        else:
            v = rng.randrange(grp.n)
            x = [0] * grp.n
            for kl in ks:
                t = rng.randint(-1, 1)
                x = [a + t * b for a, b in zip(x, kl)]
            y = [rng.randint(-size_bound, size_bound) for _ in range(grp.m)]
            if not any(x) and not any(y):
                continue
            step = _replace(grp, v, multiply(grp, grp.generator(v), GroupElement(x, y)))
            if not is_automorphism(grp, step):
                continue
        phi = compose(step, phi)
        done += 1
    return phi
