import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from orderlab.poset import (
    CycleError,
    MonotoneMap,
    POINTWISE,
    DUAL,
    antichain,
    are_isomorphic,
    boolean_lattice,
    canonical_form,
    chain,
    cotensor,
    enumerate_monotone_maps,
    equalizer,
    find_isomorphism,
    inserter,
    is_adjunction,
    is_lattice,
    lattice_ops,
    lattice_witness,
    lattices_up_to,
    leq_maps,
    m3,
    make_poset,
    n5,
    poset_from_json,
    posets_up_to,
    product,
    split_idempotent,
    to_mask,
    try_adjoint,
)


# unlabelled posets and lattices by size
POSET_COUNTS = [1, 1, 2, 5, 16, 63]
LATTICE_COUNTS = [0, 1, 1, 1, 2, 5, 15]


@st.composite
def random_poset(draw, max_n=5):
    n = draw(st.integers(0, max_n))
    pairs = draw(st.lists(st.tuples(st.integers(0, max(n - 1, 0)), st.integers(0, max(n - 1, 0))), max_size=8))
    # orient every pair upward so there is no cycle
    edges = [(min(a, b), max(a, b)) for a, b in pairs if a != b and n]
    return make_poset(list(range(n)), edges)


def test_cycle_rejected():
    with pytest.raises(CycleError):
        make_poset(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])


def test_transitive_closure():
    P = make_poset("abc", [("a", "b"), ("b", "c")])
    assert P.le("a", "c")
    assert not P.le("c", "a")


@pytest.mark.parametrize("n", range(6))
def test_poset_counts(n):
    assert sum(1 for P in posets_up_to(n) if len(P) == n) == POSET_COUNTS[n]


def test_poset_counts_against_labelled_bruteforce():
    for n in range(4):
        mine = [oracles.relation(P) for P in posets_up_to(n) if len(P) == n]
        ref = oracles.iso_classes(oracles.all_posets_on(n))
        assert len(mine) == len(ref)
        for R in ref:
            assert any(oracles.isomorphic(R, S) for S in mine)


@pytest.mark.parametrize("n", range(7))
def test_lattice_counts(n):
    got = [L for L in lattices_up_to(n) if len(L) == n]
    assert len(got) == LATTICE_COUNTS[n]
    assert all(oracles.is_lattice(oracles.relation(L)) for L in got)


@settings(max_examples=60, deadline=None)
@given(random_poset(), st.randoms(use_true_random=False))
def test_canonical_form_is_invariant(P, rnd):
    order = list(range(len(P)))
    rnd.shuffle(order)
    Q = P.permuted(order)
    assert canonical_form(P) == canonical_form(Q)
    assert are_isomorphic(P, Q)
    phi = find_isomorphism(P, Q)
    assert phi is not None and phi.is_injective() and phi.is_order_reflecting()


def test_non_isomorphic_posets_have_distinct_forms():
    ps = list(posets_up_to(4))
    assert len({canonical_form(P) for P in ps}) == len(ps)


@settings(max_examples=60, deadline=None)
@given(random_poset(4))
def test_lattice_ops_match_bruteforce(P):
    R = oracles.relation(P)
    assert is_lattice(P) == oracles.is_lattice(R)
    if is_lattice(P):
        ops = lattice_ops(P)
        for a in range(len(P)):
            for b in range(len(P)):
                assert ops.join(a, b) == oracles.sup(R, (a, b))
                assert ops.meet(a, b) == oracles.inf(R, (a, b))
    else:
        assert lattice_witness(P) is not None


def test_adjoints_match_bruteforce():
    shapes = [chain(3), antichain(2), boolean_lattice(2), n5(), make_poset("abc", [("a", "b"), ("a", "c")])]
    for P in shapes:
        for Q in shapes:
            Rp, Rq = oracles.relation(P), oracles.relation(Q)
            for f in enumerate_monotone_maps(P, Q):
                ref = oracles.left_adjoint(Rp, Rq, f.values)
                g = try_adjoint(f, "left")
                if ref is None:
                    assert g is None
                else:
                    assert g is not None and tuple(g.values) == ref
                    assert is_adjunction(g, f)


def test_dual_enrichment_swaps_sides():
    P = chain(3)
    for f in enumerate_monotone_maps(P, P):
        left = try_adjoint(f, "left", POINTWISE)
        right_dual = try_adjoint(f, "right", DUAL)
        assert (left is None) == (right_dual is None)
        if left is not None:
            assert left.values == right_dual.values


def test_monotone_map_count_matches_bruteforce():
    for P in posets_up_to(3):
        for Q in posets_up_to(3):
            got = sum(1 for _ in enumerate_monotone_maps(P, Q))
            ref = sum(1 for _ in oracles.monotone_maps(oracles.relation(P), oracles.relation(Q)))
            assert got == ref


def test_non_monotone_rejected():
    P = chain(2)
    with pytest.raises(Exception):
        MonotoneMap(P, P, [1, 0])


def test_cotensor_is_hom_poset():
    I, X = chain(2), boolean_lattice(2)
    C, proj = cotensor(I, X)
    assert len(C) == sum(1 for _ in oracles.monotone_maps(oracles.relation(I), oracles.relation(X)))
    assert len(proj) == len(I)


def test_product_and_equalizer():
    P, projs = product([chain(2), chain(2)])
    assert are_isomorphic(P, boolean_lattice(2))
    f = MonotoneMap.identity(chain(3))
    g = MonotoneMap(chain(3), chain(3), [0, 1, 1])
    E, incl = equalizer(f, g)
    assert len(E) == 2 and incl.is_injective()


def test_inserter_pointwise():
    X = chain(3)
    f = MonotoneMap(X, X, [1, 1, 2])
    g = MonotoneMap.identity(X)
    # {x | f(x) <= g(x)}
    E, incl = inserter(f, g)
    assert sorted(incl.values) == [1, 2]


def test_split_idempotent():
    X = chain(3)
    e = MonotoneMap(X, X, [0, 2, 2])
    Y, r, s = split_idempotent(e)
    assert len(Y) == 2
    assert (r @ s).values == MonotoneMap.identity(Y).values
    assert (s @ r).values == e.values


def test_leq_maps_dual():
    X = chain(2)
    lo, hi = MonotoneMap(X, X, [0, 0]), MonotoneMap(X, X, [1, 1])
    assert leq_maps(lo, hi, POINTWISE)
    assert leq_maps(hi, lo, DUAL)


def test_to_mask_repeats():
    assert to_mask([1, 1, 3]) == 0b1010


def test_json_round_trip():
    for P in [m3(), n5(), chain(4)]:
        Q = poset_from_json(P.to_json())
        assert are_isomorphic(P, Q)


def test_random_upsets_count():
    rnd = random.Random(5)
    for P in posets_up_to(4):
        R = oracles.relation(P)
        assert len(P.upsets()) == len(oracles.up_sets(R))
        assert len(P.downsets()) == len(oracles.down_sets(R))
        S = to_mask(rnd.sample(range(len(P)), min(2, len(P))))
        assert P.is_upset(P.upclosure(S))
