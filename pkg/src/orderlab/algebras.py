"""Eilenberg-Moore algebras of the bundled monads, their splittings, and
injectivity / algebraicity tests on finite instances."""

from __future__ import annotations

from dataclasses import dataclass, field

from .finspace import as_poset
from .monads import Monad, SizeCapExceeded
from .poset import (
    POINTWISE,
    MonotoneMap,
    Poset,
    PosetError,
    bits,
    enumerate_monotone_maps,
    hom_poset,
    is_adjunction,
    is_epi_bounded,
    isomorphisms,
    leq_maps,
    posets_up_to,
    try_adjoint,
)


class NotSplit(PosetError):
    """The algebra's structure map has no further adjoint."""


@dataclass(frozen=True)
class Algebra:
    monad: Monad
    carrier: Poset
    structure: MonotoneMap  # T X -> X

    def __repr__(self):
        return f"<{self.monad.name}-algebra on {len(self.carrier)} elements>"

    def unit_law(self) -> bool:
        return (self.structure @ self.monad.unit(self.carrier)) == MonotoneMap.identity(self.carrier)

    def assoc_law(self) -> bool:
        T, a = self.monad, self.structure
        return (a @ T.fmap(a)).values == (a @ T.mult(self.carrier)).values

    def is_valid(self) -> bool:
        return self.unit_law() and self.assoc_law()


@dataclass(frozen=True)
class Splitting:
    algebra: Algebra
    t: MonotoneMap  # X -> T X
    checks: dict = field(default_factory=dict, compare=False)

    @property
    def valid(self) -> bool:
        return all(self.checks.values())


def free_algebra(T: Monad, Y) -> Algebra:
    Y = as_poset(Y)
    return Algebra(T, T.obj(Y), T.mult(Y))


def find_algebra_structure(T: Monad, X) -> Algebra | None:
    """The structure map is the adjoint of the unit, when that adjoint exists
    and satisfies the algebra laws."""
    X = as_poset(X)
    e = T.unit(X)
    alpha = try_adjoint(e, "left", T.enrich)
    if alpha is None or not T.is_morphism(alpha):
        return None
    A = Algebra(T, X, alpha)
    return A if A.is_valid() else None


def algebra_structures_exhaustive(T: Monad, X) -> list[Algebra]:
    """Every structure map T X -> X satisfying the unit and associativity laws,
    found by enumerating all base morphisms; needed when T is not KZ."""
    X = as_poset(X)
    e = T.unit(X)
    ident = MonotoneMap.identity(X)
    out = []
    for alpha in enumerate_monotone_maps(T.obj(X), X):
        if T.is_morphism(alpha) and (alpha @ e) == ident:
            A = Algebra(T, X, alpha)
            if A.assoc_law():
                out.append(A)
    return out


def enumerate_algebras(T: Monad, max_size: int, min_size: int = 0) -> list[Algebra]:
    out = []
    for X in T.base_objects(max_size):
        if len(X) < min_size:
            continue
        A = find_algebra_structure(T, X)
        if A is not None:
            out.append(A)
    return out


def em_equivalence_table(T: Monad, X) -> list[tuple]:
    """For every monotone alpha: T X -> X, the triple
    (alpha.e = id, alpha adjoint to e, unit and associativity laws)."""
    X = as_poset(X)
    TX = T.obj(X)
    e = T.unit(X)
    ident = MonotoneMap.identity(X)
    rows = []
    for alpha in enumerate_monotone_maps(TX, X):
        if not T.is_morphism(alpha):
            continue
        retract = (alpha @ e) == ident
        adjoint = is_adjunction(alpha, e, T.enrich)
        laws = retract and Algebra(T, X, alpha).assoc_law()
        rows.append((alpha, retract, adjoint, laws))
    return rows


def is_homomorphism(f: MonotoneMap, A: Algebra, B: Algebra) -> bool:
    T = A.monad
    return (B.structure @ T.fmap(f)).values == (f @ A.structure).values


@dataclass
class HomReport:
    holds: bool
    checked: int
    witness: tuple | None = None


def check_left_adjoints_are_homs(T: Monad, bound: int) -> HomReport:
    """Every map between algebras that has a right adjoint is a homomorphism."""
    algs = enumerate_algebras(T, bound)
    checked = 0
    for A in algs:
        for B in algs:
            for f in enumerate_monotone_maps(A.carrier, B.carrier):
                if try_adjoint(f, "right", T.enrich) is None:
                    continue
                checked += 1
                if not is_homomorphism(f, A, B):
                    return HomReport(False, checked, (A, B, f))
    return HomReport(True, checked)


def non_homomorphism_witness(T: Monad, bound: int):
    """First monotone map between algebras that is not a homomorphism."""
    algs = enumerate_algebras(T, bound)
    for A in algs:
        for B in algs:
            for f in enumerate_monotone_maps(A.carrier, B.carrier):
                if not is_homomorphism(f, A, B):
                    return A, B, f
    return None


# ---------------------------------------------------------------- injectivity


def extends_along(f: MonotoneMap, h: MonotoneMap, T: Monad | None = None):
    """Some g with g.h = f, or None."""
    for g in enumerate_monotone_maps(h.cod, f.cod):
        if T is not None and not T.is_morphism(g):
            continue
        if (g @ h).values == f.values:
            return g
    return None


def is_injective_wrt(A, hs, T: Monad | None = None) -> bool:
    """Every map dom(h) -> A extends along h, for every h in ``hs``."""
    A = as_poset(A)
    return injectivity_witness(A, hs, T) is None


def injectivity_witness(A, hs, T: Monad | None = None):
    A = as_poset(A)
    for h in hs:
        for f in enumerate_monotone_maps(h.dom, A):
            if extends_along(f, h, T) is None:
                return h, f
    return None


def _restriction(h: MonotoneMap, A: Poset, enrich):
    """The hom-map A^h: hom(Y, A) -> hom(X, A), g |-> g.h, on hom-posets."""
    HY, maps_y = hom_poset(h.cod, A, enrich)
    HX, maps_x = hom_poset(h.dom, A, enrich)
    where = {m.values: i for i, m in enumerate(maps_x)}
    R = MonotoneMap(HY, HX, [where[(g @ h).values] for g in maps_y], check=False)
    return R, maps_y, maps_x


def kan_extension_map(h: MonotoneMap, A, enrich=POINTWISE):
    """The left adjoint retraction of restriction along h, as a dict
    value-tuple of X -> A to map Y -> A, or None when A is not Kan-injective."""
    A = as_poset(A)
    R, maps_y, maps_x = _restriction(h, A, enrich)
    L = try_adjoint(R, "left", POINTWISE)
    if L is None or (R @ L) != MonotoneMap.identity(R.cod):
        return None
    return {maps_x[i].values: maps_y[L.values[i]] for i in range(len(maps_x))}


def is_kan_injective(A, h: MonotoneMap, enrich=POINTWISE) -> bool:
    return kan_extension_map(h, A, enrich) is not None


def is_kan_injective_morphism(f: MonotoneMap, h: MonotoneMap, enrich=POINTWISE) -> bool:
    """Extending then applying f agrees with applying f then extending."""
    LA = kan_extension_map(h, f.dom, enrich)
    LB = kan_extension_map(h, f.cod, enrich)
    if LA is None or LB is None:
        return False
    for kv, g in LA.items():
        k = MonotoneMap(h.dom, f.dom, kv, check=False)
        if (f @ g).values != LB[(f @ k).values].values:
            return False
    return True


def unit_class(T: Monad, bound: int) -> list[MonotoneMap]:
    return [T.unit(X) for X in T.base_objects(bound)]


# ---------------------------------------------------------------- splittings


def find_splitting(A: Algebra) -> Splitting | None:
    """The further adjoint t of the structure map, with its defining properties
    checked (alpha.t = id, t a homomorphism, t <= e, t idempotent in Kleisli)."""
    T, X, alpha = A.monad, A.carrier, A.structure
    t = try_adjoint(alpha, "left", T.enrich)
    if t is None or not T.is_morphism(t):
        return None
    e = T.unit(X)
    m = T.mult(X)
    Tt = T.fmap(t)
    checks = {
        "retraction": (alpha @ t) == MonotoneMap.identity(X),
        "homomorphism": (m @ Tt).values == (t @ alpha).values,
        "below_unit": leq_maps(t, e, T.enrich),
        "kleisli_idempotent": (m @ Tt @ t) == t,
    }
    return Splitting(A, t, checks)


def free_splitting(T: Monad, Y) -> Splitting:
    """The free algebra T Y splits by T e_Y."""
    return find_splitting(free_algebra(T, Y))


# ---------------------------------------------------------------- algebraicity


def algebra_isomorphism(A: Algebra, B: Algebra):
    """An order isomorphism that is also a homomorphism, or None."""
    for phi in isomorphisms(A.carrier, B.carrier):
        if is_homomorphism(phi, A, B):
            return phi
    return None


def default_direct_bound(T: Monad, A: Algebra) -> int:
    return len(A.carrier)


def is_algebraic_direct(T: Monad, A: Algebra, size_bound: int | None = None):
    """(Y, iso) with (T Y, m_Y) isomorphic to A, searching |Y| <= size_bound."""
    if size_bound is None:
        size_bound = default_direct_bound(T, A)
    n = len(A.carrier)
    for Y in posets_up_to(size_bound):
        try:
            TY = T.obj(Y)
        except SizeCapExceeded:
            continue
        if len(TY) != n:
            continue
        phi = algebra_isomorphism(free_algebra(T, Y), A)
        if phi is not None:
            return Y, phi
    return None


@dataclass
class CharCertificate:
    algebraic: bool
    basis: Poset  # A_0, equaliser of e and t
    inclusion: MonotoneMap
    dense: bool
    surjective: bool
    epi_probe: bool
    preserves_regular_mono: bool


def equaliser_of_unit_and_splitting(S: Splitting) -> tuple[Poset, MonotoneMap]:
    X = S.algebra.carrier
    e = S.algebra.monad.unit(X)
    mask = sum(1 << x for x in range(len(X)) if e.values[x] == S.t.values[x])
    sub = X.subposet(mask)
    return sub, MonotoneMap(sub, X, list(bits(mask)), check=False)


def is_algebraic_char(A: Algebra, epi_probe: int = 2) -> CharCertificate:
    """Algebraicity from the splitting: the equaliser A_0 of e and t must be
    T-dense in A and alpha.T(i) must be an epimorphism."""
    from .kleisli import is_T_dense

    S = find_splitting(A)
    if S is None:
        raise NotSplit("algebra structure has no adjoint splitting")
    T = A.monad
    A0, i = equaliser_of_unit_and_splitting(S)
    Ti = T.fmap(i)
    regular = Ti.is_injective() and Ti.is_order_reflecting()
    dense = is_T_dense(T, i)
    h = A.structure @ Ti
    surj = h.is_surjective()
    probe = is_epi_bounded(h, epi_probe)
    return CharCertificate(dense and surj and probe, A0, i, dense, surj, probe, regular)


def is_algebraic(A: Algebra) -> bool:
    try:
        return is_algebraic_char(A).algebraic
    except NotSplit:
        return False


# ---------------------------------------------------------------- Birkhoff


def join_irreducibles(P: Poset) -> int:
    """Elements with exactly one lower cover."""
    covers = [0] * len(P)
    for a, b in P.cover_pairs():
        covers[b] += 1
    return sum(1 << x for x in range(len(P)) if covers[x] == 1)


def birkhoff_reconstruction(L: Poset):
    """Order isomorphism L -> D(J(L)) sending x to the join-irreducibles below it,
    or None when the down-sets of J(L) do not recover L."""
    J = join_irreducibles(L)
    JP = L.subposet(J)
    downs = JP.downsets()
    where = {m: i for i, m in enumerate(downs)}
    labels = [JP.labels_of(m) for m in downs]
    DJ = Poset(labels, [sum(1 << j for j, b in enumerate(downs) if a & ~b == 0) for a in downs])
    jidx = {v: k for k, v in enumerate(bits(J))}
    vals = []
    for x in range(len(L)):
        below = sum(1 << jidx[j] for j in bits(L.down[x] & J))
        vals.append(where[below])
    if len(set(vals)) != len(L) or len(DJ) != len(L):
        return None
    phi = MonotoneMap(L, DJ, vals, check=False)
    if not phi.is_monotone() or not phi.is_order_reflecting():
        return None
    return phi
