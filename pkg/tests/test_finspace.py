import pytest

import oracles
from orderlab.finspace import (
    ContinuousMap,
    FinSpace,
    NotT0,
    SpaceError,
    alexandrov,
    as_poset,
    generated_topology,
    is_compact,
    is_continuous,
    is_sober,
    open_lattice,
    sierpinski,
    space_from_json,
    specialization_poset,
)
from orderlab.poset import are_isomorphic, chain, posets_up_to


def test_sierpinski_specialisation_is_two_chain():
    P = specialization_poset(sierpinski())
    assert are_isomorphic(P, chain(2))
    # the open point is the top
    assert P.le(0, 1) and not P.le(1, 0)


def test_specialisation_convention():
    X = FinSpace.from_sets("ab", [[], ["b"], ["a", "b"]])
    P = specialization_poset(X)
    # every open containing a contains b
    assert P.le("a", "b")


@pytest.mark.parametrize("P", list(posets_up_to(4)))
def test_alexandrov_round_trip(P):
    X = alexandrov(P)
    assert len(X.opens) == len(oracles.up_sets(oracles.relation(P)))
    Q = specialization_poset(X)
    assert Q.up == P.up


def test_finite_t0_spaces_are_sober():
    for P in posets_up_to(4):
        assert is_sober(alexandrov(P))


def test_non_t0_rejected():
    X = FinSpace.from_sets("ab", [[], ["a", "b"]])
    with pytest.raises(NotT0):
        specialization_poset(X)
    with pytest.raises(NotT0):
        space_from_json({"points": ["a", "b"], "opens": [[], ["a", "b"]]})


def test_opens_must_be_a_topology():
    with pytest.raises(SpaceError):
        FinSpace.from_sets("ab", [["a"]])
    with pytest.raises(SpaceError):
        FinSpace.from_sets("abc", [[], ["a"], ["b"], ["a", "b", "c"]])


def test_generated_topology():
    X = generated_topology("abc", [0b001, 0b010])
    assert {0, 0b001, 0b010, 0b011, 0b111} == set(X.opens)


def test_continuity():
    S = sierpinski()
    ident = ContinuousMap.from_dict(S, S, {0: 0, 1: 1})
    swap = ContinuousMap.from_dict(S, S, {0: 1, 1: 0})
    assert is_continuous(ident)
    assert not is_continuous(swap)


def test_compactness_finite():
    X = alexandrov(chain(3))
    assert all(is_compact(X, U) for U in X.opens)


def test_open_lattice_is_distributive():
    for P in posets_up_to(4):
        L = open_lattice(alexandrov(P))
        R = oracles.relation(L)
        assert oracles.is_lattice(R) and oracles.is_distributive(R)


def test_as_poset_and_json():
    X = space_from_json({"poset": {"elements": ["x", "y"], "le": [["x", "y"]]}})
    assert as_poset(X).le("x", "y")
    with pytest.raises(TypeError):
        as_poset(3)
