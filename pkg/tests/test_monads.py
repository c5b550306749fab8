import pytest
from hypothesis import given, settings, strategies as st

import oracles
from orderlab.monads import (
    DownsetMonad,
    NotInBase,
    OpenLattice,
    enumerate_filters,
    enumerate_filters_bruteforce,
    filter_space_is_alexandrov,
    get_monad,
    is_order_faithful,
    verify_kz,
    verify_monad_laws,
    verify_naturality,
)
from orderlab.poset import (
    MonotoneMap,
    antichain,
    are_isomorphic,
    bits,
    boolean_lattice,
    chain,
    enumerate_monotone_maps,
    lattices_up_to,
    m3,
    make_poset,
    posets_up_to,
)

ALL = ["D", "I", "F", "F1", "F2", "Fc"]
VEE = make_poset("abc", [("a", "b"), ("a", "c")])


def test_unknown_monad():
    with pytest.raises(ValueError):
        get_monad("Q")


@pytest.mark.parametrize("P", list(posets_up_to(4)))
def test_downsets_match_bruteforce(P):
    D = get_monad("D")
    DP = D.obj(P)
    ref = oracles.down_sets(oracles.relation(P))
    assert len(DP) == len(ref)
    # ordered by inclusion
    labs = [frozenset(x) for x in DP.elements]
    for i, a in enumerate(labs):
        for j, b in enumerate(labs):
            assert DP.leq(i, j) == (a <= b)


def test_ideals_of_finite_poset_are_principal():
    I = get_monad("I")
    for P in posets_up_to(4):
        assert len(I.obj(P)) == len(P)


@pytest.mark.parametrize("P", list(posets_up_to(4)))
def test_filters_match_meet_closed_upsets(P):
    opens, ref = oracles.filters_of_opens(oracles.relation(P))
    L = OpenLattice.of(P)
    got = {frozenset(frozenset(bits(L.opens[i])) for i in bits(F)) for F in enumerate_filters(L)}
    ref_masks = {frozenset(frozenset(U) for U in fam) for fam in ref}
    assert got == ref_masks
    assert len(enumerate_filters_bruteforce(P)) == len(ref)


def test_filter_kinds_sizes_on_sierpinski():
    S = chain(2)
    # opens: {}, {1}, {0,1}
    sizes = {name: len(get_monad(name).obj(S)) for name in ALL if name.startswith("F")}
    assert sizes == {"F": 3, "F1": 2, "F2": 2, "Fc": 2}


@pytest.mark.parametrize("name", ALL + ["adjbounds"])
def test_monad_laws(name):
    T = get_monad(name)
    for X in T.base_objects(3):
        r = verify_monad_laws(T, X)
        assert r.holds, (name, X, r.failures)
        assert not r.skipped


def test_corrupted_multiplication_is_caught():
    class Broken(DownsetMonad):
        def _mult(self, X):
            good = super()._mult(X)
            top = len(good.cod) - 1
            return MonotoneMap(good.dom, good.cod, [top] * len(good.dom), check=False)

    T = Broken()
    r = verify_monad_laws(T, chain(2))
    assert not r.holds
    assert r.failures


@pytest.mark.parametrize("name", ALL)
def test_kz_conditions_all_hold(name):
    T = get_monad(name)
    for X in T.base_objects(3):
        r = verify_kz(T, X)
        assert r.cond_i and r.cond_ii and r.cond_iii


def test_adjoin_bounds_is_not_kz():
    T = get_monad("adjbounds")
    for L in lattices_up_to(4):
        r = verify_kz(T, L)
        assert not (r.cond_i or r.cond_ii or r.cond_iii)
        assert r.agree


def test_adjoin_bounds_rejects_non_lattice():
    T = get_monad("adjbounds")
    with pytest.raises(NotInBase):
        T.obj(VEE)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ALL), st.integers(0, 10_000))
def test_unit_and_mult_natural(name, seed):
    T = get_monad(name)
    shapes = [chain(2), antichain(2), VEE, boolean_lattice(2)]
    P = shapes[seed % len(shapes)]
    Q = shapes[(seed // 4) % len(shapes)]
    maps = list(enumerate_monotone_maps(P, Q))
    f = maps[seed % len(maps)]
    rep = verify_naturality(T, f)
    assert all(rep.values())


def test_fc_is_idempotent_and_trivial():
    Fc = get_monad("Fc")
    for X in posets_up_to(4):
        assert are_isomorphic(Fc.obj(X), X)
        e = Fc.unit(X)
        assert e.is_injective() and e.is_surjective() and e.is_order_reflecting()


def test_filter_monad_dual_enrichment_order():
    # x <= y means every open around x contains y, so the neighbourhood
    # filter of x is contained in that of y
    F = get_monad("F")
    X = chain(2)
    e = F.unit(X)
    FX = F.obj(X)
    nx, ny = (frozenset(FX.elements[e.values[i]]) for i in (0, 1))
    assert nx < ny
    assert FX.leq(e.values[0], e.values[1])


def test_filter_space_is_alexandrov():
    F = get_monad("F")
    for X in posets_up_to(3):
        assert filter_space_is_alexandrov(F, X)


def test_order_faithful():
    for name in ("D", "F"):
        rep = is_order_faithful(get_monad(name), 2)
        assert rep.agree


def test_size_cap():
    from orderlab.monads import SizeCapExceeded

    D = get_monad("D")
    D.max_elements = 10
    with pytest.raises(SizeCapExceeded):
        D.obj(antichain(4))


def test_lattice_objects_of_adjoin_bounds():
    T = get_monad("adjbounds")
    X = m3()
    assert len(T.obj(X)) == len(X) + 2
