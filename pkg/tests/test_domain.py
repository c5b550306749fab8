import pytest

import oracles
from orderlab.algebras import find_algebra_structure
from orderlab.domain import (
    FLAGS,
    classify,
    compacts,
    flag_witness,
    is_F_disconnected,
    psi_construction,
    alpha_is_sup_below_unit,
    split_criteria_row,
    totally_below,
    way_below,
)
from orderlab.monads import get_monad
from orderlab.poset import (
    antichain,
    boolean_lattice,
    chain,
    lattice_ops,
    lattices_up_to,
    m3,
    make_poset,
    n5,
    posets_up_to,
)


def _approx_oracle(P, directed):
    R = oracles.relation(P)
    n = len(P)
    rel = set()
    for x in range(n):
        for y in range(n):
            ok = True
            for S in oracles.subsets(n):
                if directed:
                    if not S or not all(any(R[a][c] and R[b][c] for c in S) for a in S for b in S):
                        continue
                s = oracles.sup(R, S)
                if s is None or not R[y][s]:
                    continue
                if not any(R[x][t] for t in S):
                    ok = False
                    break
            if ok:
                rel.add((x, y))
    return rel


@pytest.mark.parametrize("P", list(posets_up_to(4)))
def test_way_below_matches_bruteforce(P):
    wb = way_below(P)
    got = {(x, y) for x in range(len(P)) for y in range(len(P)) if wb.holds(x, y)}
    assert got == _approx_oracle(P, True)
    # on finite posets way-below is the order itself
    assert got == {(x, y) for x in range(len(P)) for y in range(len(P)) if P.leq(x, y)}


@pytest.mark.parametrize("P", list(posets_up_to(4)))
def test_totally_below_matches_bruteforce(P):
    tb = totally_below(P)
    got = {(x, y) for x in range(len(P)) for y in range(len(P)) if tb.holds(x, y)}
    assert got == _approx_oracle(P, False)


@pytest.mark.parametrize("L", list(lattices_up_to(6)))
def test_finite_lattice_flags(L):
    flags = classify(L)
    dist = oracles.is_distributive(oracles.relation(L))
    assert flags["lattice"]
    assert flags["distributive"] == dist
    assert flags["frame"] == flags["coframe"] == dist
    assert flags["completely_distributive"] == dist
    assert flags["continuous"] and flags["algebraic_domain"] and flags["directed_complete"]


def test_m3_distributivity_witness_replays():
    L = m3()
    w = flag_witness(L, "distributive")
    assert w["kind"] == "triple"
    ops = lattice_ops(L)
    x, y, z = (L.index(w[k]) for k in "xyz")
    assert ops.meet(x, ops.join(y, z)) != ops.join(ops.meet(x, y), ops.meet(x, z))


def test_non_lattice_witness():
    V = make_poset("abc", [("a", "b"), ("a", "c")])
    flags = classify(V)
    assert not flags["lattice"]
    w = flag_witness(V, "distributive")
    assert w["kind"] == "no_bound"


def test_flag_witnesses_replay_on_small_posets():
    for P in posets_up_to(4):
        flags = classify(P)
        for f in FLAGS:
            if not flags[f]:
                assert flag_witness(P, f) is not None, (P, f)


def test_totally_compact_elements_of_chain():
    # in a chain every nonzero element is totally compact (the bottom is the empty sup)
    P = chain(3)
    tb = totally_below(P)
    assert [x for x in range(3) if tb.holds(x, x)] == [1, 2]
    assert compacts(P) == P.full


def test_antichain_flags():
    flags = classify(antichain(2))
    # the empty subset has upper bounds but no least one
    assert not flags["lattice"] and not flags["bounded_complete"]
    assert flag_witness(antichain(2), "bounded_complete") == {"kind": "no_sup", "S": []}


@pytest.mark.parametrize("L", list(lattices_up_to(6)))
def test_psi_construction_iff_distributive(L):
    dist = oracles.is_distributive(oracles.relation(L))
    cert = psi_construction(L)
    assert cert.ok == dist
    if not cert.ok:
        assert cert.failure is not None


def test_split_criteria_named_lattices():
    for L in (m3(), n5()):
        r = split_criteria_row(L)
        assert not r.split and not r.psi and not r.coframe and r.agree
    for L in (chain(1), chain(4), boolean_lattice(2), boolean_lattice(3)):
        r = split_criteria_row(L)
        assert r.split and r.psi and r.coframe and r.agree


def test_alpha_formula_on_filter_algebras():
    F = get_monad("F")
    for L in lattices_up_to(5):
        A = find_algebra_structure(F, L)
        assert alpha_is_sup_below_unit(A)


@pytest.mark.parametrize("L", list(lattices_up_to(5)))
def test_disconnected_iff_distributive(L):
    F = get_monad("F")
    rep = is_F_disconnected(find_algebra_structure(F, L))
    assert rep.disconnected == oracles.is_distributive(oracles.relation(L))
    if rep.disconnected:
        assert rep.agrees_with_splitting
