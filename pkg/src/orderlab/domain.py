"""Approximation relations, lattice-theoretic flags, and the filter-algebra
splitting constructions on finite lattices.

All formulas here use the specialisation order of a space (its order as a
poset), not the enrichment order: for the filter monads the hom-order is the
reverse, so "alpha -| e" in the enrichment reads "e -| alpha" below.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebras import Algebra, find_algebra_structure, find_splitting
from .finspace import as_poset
from .monads import FilterMonad, filter_monad
from .poset import (
    MonotoneMap,
    Poset,
    PosetError,
    bits,
    is_lattice,
    lattice_ops,
    lattices_up_to,
    to_mask,
)

SUBSET_CAP = 12


class TooLarge(PosetError):
    pass


@dataclass
class RelationTable:
    poset: Poset
    rel: list  # rel[x] = mask of y with x R y

    def holds(self, x: int, y: int) -> bool:
        return bool((self.rel[x] >> y) & 1)

    def pairs(self) -> list[tuple]:
        P = self.poset
        return [(P.elements[x], P.elements[y]) for x in range(len(P)) for y in bits(self.rel[x])]


def _suprema(P: Poset, directed_only: bool):
    """(subset mask, sup index) for every subset with a supremum."""
    n = len(P)
    if n > SUBSET_CAP:
        raise TooLarge(f"subset enumeration capped at {SUBSET_CAP} elements")
    for S in range(1 << n):
        if directed_only and (S == 0 or not P.is_directed(S)):
            continue
        s = P.sup(S)
        if s is not None:
            yield S, s


def _approximation(P: Poset, directed_only: bool) -> RelationTable:
    """x R y iff whenever y <= sup S there is s in S with x <= s."""
    n = len(P)
    rel = [P.full for _ in range(n)]
    for S, s in _suprema(P, directed_only):
        reach = 0  # x below some member of S
        for m in bits(S):
            reach |= P.down[m]
        for y in bits(P.down[s]):
            # y <= sup S; elements outside reach lose y
            for x in range(n):
                if not (reach >> x) & 1:
                    rel[x] &= ~(1 << y)
    return RelationTable(P, rel)


def way_below(P: Poset) -> RelationTable:
    """Directed subsets only.  Past the subset cap the finite shortcut
    (every directed set contains its supremum, so way-below is <=) is used."""
    if len(P) > SUBSET_CAP:
        return RelationTable(P, list(P.up))
    return _approximation(P, True)


def totally_below(P: Poset) -> RelationTable:
    return _approximation(P, False)


def compacts(P: Poset) -> int:
    wb = way_below(P)
    return sum(1 << x for x in range(len(P)) if wb.holds(x, x))


def totally_compacts(P: Poset) -> int:
    tb = totally_below(P)
    return sum(1 << x for x in range(len(P)) if tb.holds(x, x))


# ---------------------------------------------------------------- classification


def distributivity_witness(P: Poset):
    """(x, y, z) with x meet (y join z) != (x meet y) join (x meet z)."""
    L = lattice_ops(P)
    n = len(P)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if L.meet(x, L.join(y, z)) != L.join(L.meet(x, y), L.meet(x, z)):
                    return x, y, z
    return None


def frame_witness(P: Poset):
    """(x, S) where x meet sup S differs from sup of the x meet s."""
    L = lattice_ops(P)
    n = len(P)
    if n > SUBSET_CAP:
        raise TooLarge("frame law check enumerates subsets")
    for S in range(1 << n):
        for x in range(n):
            rhs = L.sup(to_mask(L.meet(x, s) for s in bits(S)))
            if L.meet(x, L.sup(S)) != rhs:
                return x, S
    return None


def coframe_witness(P: Poset):
    """The dual law: finite joins over arbitrary meets."""
    L = lattice_ops(P)
    n = len(P)
    if n > SUBSET_CAP:
        raise TooLarge("coframe law check enumerates subsets")
    for S in range(1 << n):
        for x in range(n):
            rhs = L.inf(to_mask(L.join(x, s) for s in bits(S)))
            if L.join(x, L.inf(S)) != rhs:
                return x, S
    return None


def _directed_complete(P: Poset) -> bool:
    return all(P.sup(S) is not None for S in range(1, 1 << len(P)) if P.is_directed(S))


def _bounded_complete(P: Poset) -> bool:
    return all(P.sup(S) is not None for S in range(1 << len(P)) if P.upper_bounds(S))


def _generated(P: Poset, rel: RelationTable, basis: int | None, directed: bool) -> bool:
    """x = sup{y | y R x} (restricted to basis elements when given), for all x."""
    for x in range(len(P)):
        if basis is None:
            S = sum(1 << y for y in range(len(P)) if rel.holds(y, x))
        else:
            S = basis & P.down[x]
        if directed and (S == 0 or not P.is_directed(S)):
            return False
        if P.sup(S) != x:
            return False
    return True


FLAGS = (
    "continuous",
    "algebraic_domain",
    "completely_distributive",
    "totally_algebraic",
    "lattice",
    "distributive",
    "frame",
    "coframe",
    "bounded_complete",
    "directed_complete",
)


def classify(P: Poset) -> dict:
    P = as_poset(P)
    wb, tb = way_below(P), totally_below(P)
    K = sum(1 << x for x in range(len(P)) if wb.holds(x, x))
    TK = sum(1 << x for x in range(len(P)) if tb.holds(x, x))
    dcpo = _directed_complete(P)
    lat = is_lattice(P)
    out = {
        "continuous": dcpo and _generated(P, wb, None, True),
        "algebraic_domain": dcpo and _generated(P, wb, K, True),
        "completely_distributive": lat and _generated(P, tb, None, False),
        "totally_algebraic": lat and _generated(P, tb, TK, False),
        "lattice": lat,
        "distributive": lat and distributivity_witness(P) is None,
        "frame": lat and frame_witness(P) is None,
        "coframe": lat and coframe_witness(P) is None,
        "bounded_complete": _bounded_complete(P),
        "directed_complete": dcpo,
    }
    return out


def flag_witness(P: Poset, flag: str):
    """A re-checkable reason why ``flag`` fails, as plain data."""
    P = as_poset(P)
    lab = P.elements
    if flag in ("distributive", "frame", "coframe", "completely_distributive", "totally_algebraic") and not is_lattice(P):
        flag = "lattice"
    if flag == "lattice":
        from .poset import lattice_witness

        return {"kind": "no_bound", "detail": lattice_witness(P)}
    if flag == "distributive":
        w = distributivity_witness(P)
        return w and {"kind": "triple", "x": lab[w[0]], "y": lab[w[1]], "z": lab[w[2]]}
    if flag in ("frame", "coframe"):
        w = (frame_witness if flag == "frame" else coframe_witness)(P)
        return w and {"kind": "subset", "x": lab[w[0]], "S": sorted(P.labels_of(w[1]), key=str)}
    if flag in ("completely_distributive", "totally_algebraic", "continuous", "algebraic_domain"):
        rel = totally_below(P) if flag in ("completely_distributive", "totally_algebraic") else way_below(P)
        for x in range(len(P)):
            if flag in ("completely_distributive", "continuous"):
                S = sum(1 << y for y in range(len(P)) if rel.holds(y, x))
            else:
                S = sum(1 << y for y in range(len(P)) if rel.holds(y, y)) & P.down[x]
            if P.sup(S) != x:
                return {"kind": "not_generated", "x": lab[x], "approximants": sorted(P.labels_of(S), key=str)}
        return None
    if flag == "bounded_complete":
        for S in range(1 << len(P)):
            if P.upper_bounds(S) and P.sup(S) is None:
                return {"kind": "no_sup", "S": sorted(P.labels_of(S), key=str)}
        return None
    if flag == "directed_complete":
        return None
    raise ValueError(f"unknown flag {flag!r}")


# ---------------------------------------------------------------- F-algebras


def _filters_containing(T: FilterMonad, X: Poset, open_index: int) -> list[int]:
    return [k for k, F in enumerate(T.filter_masks(X)) if (F >> open_index) & 1]


def mu_set(A: Algebra, open_index: int) -> int:
    """mu(U) = {alpha(f) | U in f}, as a mask over the carrier."""
    T, X = A.monad, A.carrier
    return to_mask(A.structure.values[k] for k in _filters_containing(T, X, open_index))


@dataclass
class DisconnectedReport:
    disconnected: bool
    t: MonotoneMap | None = None
    agrees_with_splitting: bool | None = None
    witness_open: frozenset | None = None


def is_F_disconnected(A: Algebra) -> DisconnectedReport:
    """All mu(U) open; then t(x) = {U | x in mu(U)} is compared with the splitting."""
    T, X = A.monad, A.carrier
    L = T.open_lattice(X)
    mus = []
    for i, U in enumerate(L.opens):
        mu = mu_set(A, i)
        if not X.is_upset(mu):
            return DisconnectedReport(False, witness_open=X.labels_of(U))
        mus.append(mu)
    TX = T.obj(X)
    where = {F: k for k, F in enumerate(T.filter_masks(X))}
    vals = []
    for x in range(len(X)):
        F = sum(1 << i for i, mu in enumerate(mus) if (mu >> x) & 1)
        if F not in where:
            return DisconnectedReport(True, None, False)
        vals.append(where[F])
    t = MonotoneMap(X, TX, vals, check=False)
    S = find_splitting(A)
    return DisconnectedReport(True, t, S is not None and S.t == t)


@dataclass
class PsiCertificate:
    ok: bool
    failure: str | None = None
    witness: dict = field(default_factory=dict)
    t: MonotoneMap | None = None


def psi_construction(A_lattice: Poset, T: FilterMonad | None = None) -> PsiCertificate:
    """Right adjoint of the filter-algebra structure on a finite lattice, built
    from psi_a = {G open | meet of the compacts in G is <= a}."""
    A = as_poset(A_lattice)
    T = T or filter_monad("F")
    ops = lattice_ops(A)
    alg = find_algebra_structure(T, A)
    if alg is None:
        return PsiCertificate(False, "no_algebra")
    L = T.open_lattice(A)
    fx = T.filter_masks(A)
    where = {F: k for k, F in enumerate(fx)}
    K = compacts(A)
    lab = A.elements

    def meet_k(G: int) -> int:
        return ops.inf(G & K)

    kmeets = [meet_k(G) for G in L.opens]
    psi = []
    for a in range(len(A)):
        psi.append(sum(1 << i for i, c in enumerate(kmeets) if A.leq(c, a)))

    def opens_of(i):
        return sorted(lab[p] for p in bits(L.opens[i]))

    # psi_a is a filter
    for a, F in enumerate(psi):
        if not L.is_filter(F):
            for g in bits(F):
                for h in bits(F):
                    if not (F >> L.meet_index(g, h)) & 1:
                        return PsiCertificate(False, "filter", {"a": lab[a], "G": opens_of(g), "H": opens_of(h)})
            return PsiCertificate(False, "filter", {"a": lab[a]})
    # psi_a is the union of S_a = {phi | alpha(phi) <= a}
    alpha = alg.structure
    for a in range(len(A)):
        union = 0
        for k, F in enumerate(fx):
            if A.leq(alpha.values[k], a):
                union |= F
        if union != psi[a]:
            return PsiCertificate(False, "union_of_S_a", {"a": lab[a]})
    if any(F not in where for F in psi):
        return PsiCertificate(False, "carrier", {})
    t = MonotoneMap(A, T.obj(A), [where[F] for F in psi], check=False)
    # continuity: t^-1(U^#) = up(meet k(U)), an open set
    for i in range(len(L)):
        pre = sum(1 << a for a in range(len(A)) if (psi[a] >> i) & 1)
        if pre != A.up[kmeets[i]]:
            return PsiCertificate(False, "continuity", {"U": opens_of(i)})
    if not t.is_monotone():
        return PsiCertificate(False, "continuity", {})
    # alpha t = id and phi <= t alpha(phi)
    for a in range(len(A)):
        if alpha.values[t.values[a]] != a:
            return PsiCertificate(False, "adjunction", {"a": lab[a]})
    for k, F in enumerate(fx):
        if F & ~psi[alpha.values[k]]:
            return PsiCertificate(False, "adjunction", {"filter": sorted(map(str, T.obj(A).elements[k]))})
    return PsiCertificate(True, None, {}, t)


def alpha_is_sup_below_unit(alg: Algebra) -> bool:
    """alpha(y) = sup{z | e(z) <= y} in the specialisation order."""
    T, X = alg.monad, alg.carrier
    TX = T.obj(X)
    e = T.unit(X)
    for y in range(len(TX)):
        S = sum(1 << z for z in range(len(X)) if TX.leq(e.values[z], y))
        if X.sup(S) != alg.structure.values[y]:
            return False
    return True


def compact_image_identity(alg: Algebra) -> bool:
    """K(X) = alpha(K(T X)), with K(T X) the principal filters up(U)."""
    T, X = alg.monad, alg.carrier
    TX = T.obj(X)
    KT = compacts(TX)
    L = T.open_lattice(X)
    where = {F: k for k, F in enumerate(T.filter_masks(X))}
    principal = sum(1 << where[L.principal(i)] for i in range(len(L)) if L.principal(i) in where)
    if KT != principal:
        return False
    image = 0
    for k in bits(KT):
        image |= 1 << alg.structure.values[k]
    return image == compacts(X)


@dataclass
class SplitCriteriaRow:
    lattice: Poset
    split: bool
    psi: bool
    coframe: bool
    alpha_formula: bool
    compact_image: bool
    psi_failure: str | None = None

    @property
    def agree(self) -> bool:
        return self.split == self.psi == self.coframe and self.alpha_formula and self.compact_image


def split_criteria_row(A: Poset) -> SplitCriteriaRow:
    T = filter_monad("F")
    alg = find_algebra_structure(T, A)
    S = find_splitting(alg) if alg is not None else None
    split = S is not None and S.valid
    cert = psi_construction(A, T)
    K = A.subposet(compacts(A))
    cof = classify(K)["coframe"]
    return SplitCriteriaRow(
        A,
        split,
        cert.ok,
        cof,
        alg is not None and alpha_is_sup_below_unit(alg),
        alg is not None and compact_image_identity(alg),
        cert.failure,
    )


@dataclass
class SplitSweepReport:
    rows: list
    divergences: list

    @property
    def holds(self) -> bool:
        return not self.divergences


def split_criteria_sweep(size_bound: int) -> SplitSweepReport:
    rows = [split_criteria_row(A) for A in lattices_up_to(size_bound)]
    return SplitSweepReport(rows, [r for r in rows if not r.agree])
