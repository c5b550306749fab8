import pytest

import oracles
from orderlab.algebras import (
    NotSplit,
    algebra_isomorphism,
    algebra_structures_exhaustive,
    birkhoff_reconstruction,
    check_left_adjoints_are_homs,
    em_equivalence_table,
    enumerate_algebras,
    find_algebra_structure,
    find_splitting,
    free_algebra,
    free_splitting,
    is_algebraic,
    is_algebraic_char,
    is_algebraic_direct,
    is_homomorphism,
    is_injective_wrt,
    is_kan_injective,
    join_irreducibles,
    non_homomorphism_witness,
    unit_class,
)
from orderlab.monads import get_monad
from orderlab.poset import (
    antichain,
    bits,
    boolean_lattice,
    chain,
    enumerate_monotone_maps,
    lattices_up_to,
    m3,
    make_poset,
    n5,
    popcount,
    posets_up_to,
)

D = get_monad("D")


@pytest.mark.parametrize("P", list(posets_up_to(4)))
def test_downset_algebras_are_lattices(P):
    R = oracles.relation(P)
    A = find_algebra_structure(D, P)
    assert (A is not None) == oracles.is_lattice(R)
    if A is not None:
        TX = A.structure.dom
        for k, S in enumerate(TX.elements):
            idx = [P.index(x) for x in S]
            assert A.structure.values[k] == oracles.sup(R, idx)


def test_every_finite_poset_is_an_ideal_algebra():
    I = get_monad("I")
    for P in posets_up_to(4):
        assert find_algebra_structure(I, P) is not None


def test_filter_algebras_are_lattices():
    F = get_monad("F")
    for P in posets_up_to(4):
        assert (find_algebra_structure(F, P) is not None) == oracles.is_lattice(oracles.relation(P))


@pytest.mark.parametrize("name", ["D", "I", "F", "F1", "F2"])
def test_em_table_three_columns_agree(name):
    T = get_monad(name)
    for X in T.base_objects(3):
        for _alpha, retract, adjoint, laws in em_equivalence_table(T, X):
            assert retract == adjoint == laws


def test_exhaustive_structures_on_kz_match_adjoint():
    for L in lattices_up_to(4):
        found = algebra_structures_exhaustive(D, L)
        assert len(found) == 1
        assert found[0].structure.values == find_algebra_structure(D, L).structure.values


def test_adjoin_bounds_algebra_is_not_unit_adjoint():
    T = get_monad("adjbounds")
    X = chain(1)
    found = algebra_structures_exhaustive(T, X)
    assert len(found) == 1
    assert find_algebra_structure(T, X) is None


def test_free_algebras_valid():
    for name in ("D", "F"):
        T = get_monad(name)
        for Y in posets_up_to(2):
            A = free_algebra(T, Y)
            assert A.is_valid()
            S = free_splitting(T, Y)
            assert S.valid


def test_homs_are_sup_preserving_maps():
    algs = enumerate_algebras(D, 3)
    for A in algs:
        for B in algs:
            Ra, Rb = oracles.relation(A.carrier), oracles.relation(B.carrier)
            for f in enumerate_monotone_maps(A.carrier, B.carrier):
                ref = all(
                    f.values[oracles.sup(Ra, S)] == oracles.sup(Rb, [f.values[s] for s in S])
                    for S in oracles.subsets(len(A.carrier))
                )
                assert is_homomorphism(f, A, B) == ref


def test_left_adjoints_are_homs():
    for name in ("D", "F"):
        rep = check_left_adjoints_are_homs(get_monad(name), 3)
        assert rep.holds and rep.checked > 0


def test_non_homomorphism_exists():
    A, B, f = non_homomorphism_witness(D, 2)
    assert not is_homomorphism(f, A, B)


def test_injectivity_on_units():
    units = unit_class(D, 2)
    assert is_injective_wrt(chain(3), units, D)
    assert not is_injective_wrt(antichain(2), units)


def test_kan_injective_lattice():
    e = D.unit(antichain(2))
    assert is_kan_injective(boolean_lattice(2), e)
    assert not is_kan_injective(antichain(2), e)


@pytest.mark.parametrize("L", list(lattices_up_to(5)))
def test_split_iff_distributive(L):
    dist = oracles.is_distributive(oracles.relation(L))
    A = find_algebra_structure(D, L)
    S = find_splitting(A)
    assert (S is not None and S.valid) == dist
    assert (birkhoff_reconstruction(L) is not None) == dist
    assert is_algebraic(A) == dist


def test_not_split_raises():
    A = find_algebra_structure(D, m3())
    with pytest.raises(NotSplit):
        is_algebraic_char(A)


def test_direct_iso_to_free_algebra():
    L = boolean_lattice(2)
    A = find_algebra_structure(D, L)
    Y, phi = is_algebraic_direct(D, A)
    assert len(Y) == 2 and popcount(join_irreducibles(L)) == 2
    assert phi.is_injective() and phi.is_surjective()
    assert is_homomorphism(phi, free_algebra(D, Y), A)


def test_char_certificate_basis_is_join_irreducibles():
    for L in (chain(3), boolean_lattice(2), boolean_lattice(3)):
        A = find_algebra_structure(D, L)
        c = is_algebraic_char(A)
        assert c.algebraic
        # equaliser of e and t: the join-irreducibles (or their dual image)
        assert len(c.basis) == popcount(join_irreducibles(L))


def test_join_irreducibles_oracle():
    for L in lattices_up_to(5):
        R = oracles.relation(L)
        ref = []
        for x in range(len(L)):
            below = [y for y in range(len(L)) if R[y][x] and y != x]
            if below and oracles.sup(R, below) != x:
                ref.append(x)
        assert sorted(bits(join_irreducibles(L))) == ref


def test_algebra_isomorphism():
    A = find_algebra_structure(D, chain(3))
    B = free_algebra(D, chain(2))
    assert algebra_isomorphism(A, B) is not None
    C = find_algebra_structure(D, n5())
    assert algebra_isomorphism(C, B) is None


def test_vee_not_algebra():
    V = make_poset("abc", [("a", "b"), ("a", "c")])
    assert find_algebra_structure(D, V) is None
