import random

import pytest
from hypothesis import given, settings, strategies as st

from nilspec.graphs import complete_graph, edgeless_graph, path_graph
from nilspec.product import (CommutingError, PreconditionError, TheoremViolation,
                             analyze_automorphism, block_map, block_product, build_structured,
                             cycle_composites, diagonalize, extract_blocks,
                             group_multiplicities, reidemeister_block,
                             reidemeister_block_paths, spectrum_compose, spectrum_sample,
                             validate_block)
from nilspec.spectrum import (INF, Finite, abelian_spectrum, bounded_equal, spec_contains,
                              spec_union_fold)
from nilspec.twostep import (GroupElement, build_graph_group, compose, endo_from_matrix,
                             identity_endo, is_automorphism, reidemeister)

H = build_graph_group(edgeless_graph(2))
P4 = build_graph_group(path_graph(4))
PHI = endo_from_matrix(H, [[1, 1], [1, 0]])
ID = identity_endo(H)


def test_diagonal_blocks_valid():
    b = build_structured([H, H], [0, 1], [PHI, ID])
    phi = validate_block(b)
    assert is_automorphism(b.group, phi)
    assert analyze_automorphism(b).sigma == (0, 1)


def test_non_central_off_block_fails_commuting():
    off = [H.generator(0), H.identity()]
    b = block_map([H, H], {(0, 0): ID, (1, 1): ID, (0, 1): off})
    with pytest.raises(CommutingError) as exc:
        validate_block(b)
    assert exc.value.triple[0] == 0


def test_permutation_block_shuffles_coordinates():
    b = build_structured([H, H], [1, 0], [ID, ID])
    phi = validate_block(b)
    g = GroupElement((1, 2, 3, 4), (5, 6))
    assert phi(g) == GroupElement((3, 4, 1, 2), (6, 5))
    assert analyze_automorphism(b).sigma == (1, 0)


def test_build_structured_rejects_non_central_off_block():
    with pytest.raises(ValueError, match=r"\(0,1\)"):
        build_structured([H, H], [0, 1], [ID, ID], {(0, 1): [H.generator(0), H.identity()]})
    with pytest.raises(ValueError):
        build_structured([H, H], [0, 0], [ID, ID])
    with pytest.raises(ValueError):
        build_structured([H, H], [0, 1], [endo_from_matrix(H, [[2, 0], [0, 1]]), ID])


def test_central_off_block_is_automorphism_and_reported():
    c = H.central_generator(0)
    b = build_structured([H, H], [1, 0], [ID, PHI], {(0, 0): [c, H.identity()]})
    assert is_automorphism(b.group, validate_block(b))
    rep = analyze_automorphism(b)
    assert rep.sigma == (1, 0)
    assert all(rep.central_flags.values()) and all(rep.center_kill_flags.values())
    assert set(rep.central_flags) == {(0, 0), (1, 1)}


def test_diagonalize():
    c = H.central_generator(0)
    b = build_structured([H, H], [0, 1], [PHI, PHI], {(0, 1): [c, c]})
    d = diagonalize(b)
    assert d.block(0, 1).images == (H.identity(), H.identity())
    assert diagonalize(d) == d
    assert reidemeister(b.group, validate_block(b)) == reidemeister(d.group, validate_block(d)) == 4
    p = build_structured([H, H], [1, 0], [ID, ID])
    assert diagonalize(p) == p


def test_reidemeister_block_examples():
    assert reidemeister_block(build_structured([H, H], [0, 1], [PHI, PHI])) == 4
    assert reidemeister_block(build_structured([H, H], [1, 0], [ID, ID])) is INF
    # swap with isos A, B whose composite B o A is PHI
    b = build_structured([H, H], [1, 0], [PHI, ID])
    assert reidemeister_block_paths(b) == {"assembled": 2, "diagonalized": 2, "cycles": 2}
    [(cycle, comp)] = cycle_composites(b, (1, 0))
    assert cycle == [0, 1] and comp.A == PHI.A


def test_preconditions():
    z2 = build_graph_group(complete_graph(2))
    b = block_map([z2, H], {(0, 0): identity_endo(z2), (1, 1): ID})
    with pytest.raises(PreconditionError, match="abelian"):
        analyze_automorphism(b)
    p3 = build_graph_group(path_graph(3))
    b = block_map([p3, H], {(0, 0): identity_endo(p3), (1, 1): ID})
    with pytest.raises(PreconditionError, match="join"):
        analyze_automorphism(b)


def test_theorem_violation_on_non_automorphism():
    b = block_map([H, H], {(0, 0): endo_from_matrix(H, [[2, 0], [0, 1]]), (1, 1): ID})
    with pytest.raises(PreconditionError):
        analyze_automorphism(b)
    assert issubclass(TheoremViolation, AssertionError)


def _random_structured(factors, rng):
    """Random block automorphism: sampled diagonal isos, random sigma, central off-blocks."""
    from nilspec.twostep import sample_automorphism
    k = len(factors)
    sigma = list(range(k))
    # only swap equal factors
    if k == 2 and factors[0] == factors[1] and rng.random() < 0.5:
        sigma = [1, 0]
    isos = []
    for i in range(k):
        src = factors[sigma[i]]
        phi = sample_automorphism(src, rng.getrandbits(32), 3)
        isos.append(phi)
    off = {}
    for i in range(k):
        for j in range(k):
            if j != sigma[i] and rng.random() < 0.6:
                tgt = factors[i]
                imgs = []
                for _ in range(factors[j].n):
                    y = [rng.randint(-2, 2) for _ in range(tgt.m)]
                    imgs.append(GroupElement((0,) * tgt.n, y))
                off[(i, j)] = imgs
    return build_structured(factors, sigma, isos, off)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([(H, H), (H, P4)]))
def test_monoid_law(seed, factors):
    rng = random.Random(seed)
    b1, b2 = _random_structured(factors, rng), _random_structured(factors, rng)
    assert validate_block(block_product(b1, b2)) == compose(validate_block(b1), validate_block(b2))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([(H, H), (H, P4)]))
def test_structure_on_random_compositions(seed, factors):
    rng = random.Random(seed)
    b = block_product(_random_structured(factors, rng), _random_structured(factors, rng))
    rep = analyze_automorphism(b)
    assert sorted(rep.sigma) == [0, 1]
    assert all(rep.central_flags.values()) and all(rep.center_kill_flags.values())
    paths = reidemeister_block_paths(b)
    assert len(set(paths.values())) == 1


def test_extract_blocks_roundtrip():
    b = _random_structured((H, P4), random.Random(3))
    assert extract_blocks(validate_block(b)) == b


def test_row_images_span_finite_index():
    from nilspec.intlinalg import IntMatrix, smith_normal_form
    from nilspec.twostep import direct_product_group, sample_automorphism
    g = direct_product_group([H, H])
    for seed in range(20):
        b = extract_blocks(sample_automorphism(g, seed))
        for i in range(2):
            cols = [c for j in range(2) for c in b.block(i, j).A.columns()]
            assert smith_normal_form(IntMatrix.from_columns(cols, rows=2)).rank == 2


# --- spectra --------------------------------------------------------------

def test_spectrum_compose_examples():
    s = Finite([2, INF])
    assert spectrum_compose([(s, 1)], 0) == s
    assert bounded_equal(spectrum_compose([(s, 2)], 0), spec_union_fold(s, 2))
    assert bounded_equal(spectrum_compose([(s, 1)], 1), abelian_spectrum(1) * s)
    assert spectrum_compose([], 0) == Finite([1])
    assert bounded_equal(spectrum_compose([], 2), abelian_spectrum(2))
    with pytest.raises(ValueError):
        spectrum_compose([(s, 0)], 0)


def test_group_multiplicities():
    assert group_multiplicities([H, P4, H]) == [(H, 2), (P4, 1)]


def test_spectrum_sample():
    with pytest.raises(ValueError, match="no data"):
        spectrum_sample(H, 0, 1)
    s = spectrum_sample(H, 500, 7)
    assert 2 in s and INF in s
    assert s == spectrum_sample(H, 500, 7)
    # every R-value of an automorphism of H is even or infinite
    assert all(v is INF or v % 2 == 0 for v in s.values)


def test_containment_h_times_z():
    from nilspec.twostep import direct_product_group, sample_automorphism
    z = build_graph_group(complete_graph(1))
    s_h = spectrum_sample(H, 300, 11)
    target = spectrum_compose([(s_h, 1)], 1)
    g = direct_product_group([H, z])
    rng = random.Random(5)
    for _ in range(100):
        r = reidemeister(g, sample_automorphism(g, rng.getrandbits(32)))
        assert spec_contains(target, r)
