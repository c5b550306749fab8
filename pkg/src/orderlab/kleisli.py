"""The Kleisli category of a bundled monad, T-density, the class M_T,
Cauchy completeness, and the idempotent-split completion kar(X_T)."""

from __future__ import annotations

from dataclasses import dataclass

from .algebras import Algebra, Splitting, find_algebra_structure, find_splitting
from .finspace import as_poset
from .monads import Monad, SizeCapExceeded
from .poset import (
    MonotoneMap,
    Poset,
    PosetError,
    canonical_form,
    enumerate_monotone_maps,
    is_order_mono,
    leq_maps,
    split_idempotent,
    try_adjoint,
)


class InvalidIdempotent(PosetError):
    pass


@dataclass(frozen=True)
class KleisliArrow:
    """An arrow X -o Y, stored as a base morphism X -> T Y."""

    monad: Monad
    dom: Poset
    cod: Poset
    map: MonotoneMap

    def __post_init__(self):
        if self.map.dom != self.dom or self.map.cod != self.monad.obj(self.cod):
            raise PosetError("Kleisli arrow must be a map X -> T Y")

    def __eq__(self, other):
        return isinstance(other, KleisliArrow) and self.map == other.map and self.cod == other.cod

    def __hash__(self):
        return hash(self.map)

    def extension(self) -> MonotoneMap:
        """The homomorphism m_Y . T r : T X -> T Y."""
        return self.monad.mult(self.cod) @ self.monad.fmap(self.map)


def kleisli_identity(T: Monad, X) -> KleisliArrow:
    X = as_poset(X)
    return KleisliArrow(T, X, X, T.unit(X))


def kleisli_compose(s: KleisliArrow, r: KleisliArrow) -> KleisliArrow:
    """s after r, i.e. m . T s . r."""
    if r.cod != s.dom:
        raise PosetError("Kleisli composite of arrows that do not meet")
    T = r.monad
    return KleisliArrow(T, r.dom, s.cod, T.mult(s.cod) @ T.fmap(s.map) @ r.map)


def to_kleisli(T: Monad, f: MonotoneMap) -> KleisliArrow:
    """f_* = e_Y . f"""
    return KleisliArrow(T, f.dom, f.cod, T.unit(f.cod) @ f)


def kleisli_leq(r: KleisliArrow, s: KleisliArrow) -> bool:
    return leq_maps(r.map, s.map, r.monad.enrich)


def kleisli_adjunction(r: KleisliArrow, s: KleisliArrow) -> bool:
    """r -| s in the Kleisli category, orientation taken from the enrichment."""
    if r.dom != s.cod or r.cod != s.dom:
        return False
    T = r.monad
    return kleisli_leq(kleisli_identity(T, r.dom), kleisli_compose(s, r)) and kleisli_leq(
        kleisli_compose(r, s), kleisli_identity(T, r.cod)
    )


def kleisli_arrows(T: Monad, X, Y):
    X, Y = as_poset(X), as_poset(Y)
    for f in enumerate_monotone_maps(X, T.obj(Y)):
        if T.is_morphism(f):
            yield KleisliArrow(T, X, Y, f)


# ---------------------------------------------------------------- density


def dense_adjoint(T: Monad, f: MonotoneMap) -> KleisliArrow | None:
    """f^*: Y -o X right adjoint to f_*, built from the right adjoint of T f."""
    g = try_adjoint(T.fmap(f), "right", T.enrich)
    if g is None:
        return None
    fs = KleisliArrow(T, f.cod, f.dom, g @ T.unit(f.cod))
    return fs if kleisli_adjunction(to_kleisli(T, f), fs) else None


def is_T_dense(T: Monad, f: MonotoneMap) -> bool:
    return dense_adjoint(T, f) is not None


def is_T_dense_bruteforce(T: Monad, f: MonotoneMap) -> bool:
    """Search every Kleisli arrow Y -o X for a right adjoint of f_*."""
    fl = to_kleisli(T, f)
    return any(kleisli_adjunction(fl, s) for s in kleisli_arrows(T, f.cod, f.dom))


def in_M_T(T: Monad, h: MonotoneMap) -> bool:
    """T h has a right adjoint that is a retraction of it."""
    Th = T.fmap(h)
    g = try_adjoint(Th, "right", T.enrich)
    return g is not None and (g @ Th) == MonotoneMap.identity(Th.dom)


def all_maps_up_to(T: Monad, bound: int):
    objs = T.base_objects(bound)
    for X in objs:
        for Y in objs:
            for h in enumerate_monotone_maps(X, Y):
                if T.is_morphism(h):
                    yield h


@dataclass
class MTReport:
    holds: bool
    checked: int
    members: int
    witness: MonotoneMap | None = None


def check_M_T_identity(T: Monad, bound: int) -> MTReport:
    """M_T = T-dense maps that are order-mono, over all maps between objects <= bound."""
    checked = members = 0
    for h in all_maps_up_to(T, bound):
        checked += 1
        a = in_M_T(T, h)
        b = is_T_dense(T, h) and is_order_mono(h)
        members += a
        if a != b:
            return MTReport(False, checked, members, h)
    return MTReport(True, checked, members)


def M_T_sample(T: Monad, bound: int) -> list[MonotoneMap]:
    """Members of M_T between objects of size <= bound, plus the units there."""
    out = [h for h in all_maps_up_to(T, bound) if in_M_T(T, h)]
    out.extend(T.unit(X) for X in T.base_objects(bound))
    return out


# ---------------------------------------------------------------- Cauchy completeness


def left_adjoint_partner(r: KleisliArrow) -> KleisliArrow | None:
    """The Kleisli right adjoint of r, if r has one.

    Kleisli arrows X -o Y correspond order-isomorphically to homomorphisms
    T X -> T Y, so a right adjoint of r comes from the right adjoint of its
    extension; the adjunction is then checked in the Kleisli category itself.
    """
    T = r.monad
    g = try_adjoint(r.extension(), "right", T.enrich)
    if g is None:
        return None
    s = KleisliArrow(T, r.cod, r.dom, g @ T.unit(r.cod))
    return s if kleisli_adjunction(r, s) else None


def underlying_map(r: KleisliArrow) -> MonotoneMap | None:
    """f with r = f_*, or None."""
    e = r.monad.unit(r.cod)
    inv = {}
    for y, v in enumerate(e.values):
        inv.setdefault(v, y)
    vals = []
    for v in r.map.values:
        if v not in inv:
            return None
        vals.append(inv[v])
    f = MonotoneMap(r.dom, r.cod, vals, check=False)
    if not f.is_monotone() or (e @ f) != r.map:
        return None
    return f


@dataclass
class CauchyReport:
    complete: bool
    adjoints_seen: int
    witness: KleisliArrow | None = None


def is_cauchy_complete(T: Monad, Y, probe_bound: int = 3) -> CauchyReport:
    """Every left adjoint Kleisli arrow X -o Y with |X| <= probe_bound is f_*."""
    Y = as_poset(Y)
    seen = 0
    for X in T.base_objects(probe_bound):
        for r in kleisli_arrows(T, X, Y):
            if left_adjoint_partner(r) is None:
                continue
            seen += 1
            if underlying_map(r) is None:
                return CauchyReport(False, seen, r)
    return CauchyReport(True, seen)


# ---------------------------------------------------------------- regular monos


def preserves_regular_monos(T: Monad, bound: int) -> bool:
    """T i is an order-embedding for every order-embedding i between objects <= bound."""
    for h in all_maps_up_to(T, bound):
        if h.is_injective() and h.is_order_reflecting():
            Th = T.fmap(h)
            if not (Th.is_injective() and Th.is_order_reflecting()):
                return False
    return True


def kleisli_mono_check(T: Monad, i: MonotoneMap, probe_bound: int = 2) -> bool:
    """i_* . r = i_* . s implies r = s, for r, s: A -o dom(i) with |A| <= probe_bound."""
    il = to_kleisli(T, i)
    for A in T.base_objects(probe_bound):
        seen = {}
        for r in kleisli_arrows(T, A, i.dom):
            key = kleisli_compose(il, r).map.values
            if key in seen and seen[key] != r.map.values:
                return False
            seen[key] = r.map.values
    return True


# ---------------------------------------------------------------- kar(X_T)


@dataclass(frozen=True)
class KarObject:
    carrier: Poset
    t: KleisliArrow

    @property
    def monad(self) -> Monad:
        return self.t.monad


def kar_object(T: Monad, X, t: MonotoneMap) -> KarObject:
    """Validate t: X -> T X as an idempotent below the unit."""
    X = as_poset(X)
    k = KleisliArrow(T, X, X, t)
    if kleisli_compose(k, k) != k:
        raise InvalidIdempotent("t is not idempotent under Kleisli composition")
    if not leq_maps(t, T.unit(X), T.enrich):
        raise InvalidIdempotent("t is not below the unit")
    return KarObject(X, k)


def is_kar_object(T: Monad, X, t: MonotoneMap) -> bool:
    try:
        kar_object(T, X, t)
    except InvalidIdempotent:
        return False
    return True


def kar_iso_witnessed(k1: KarObject, k2: KarObject, a: KleisliArrow, b: KleisliArrow) -> bool:
    """a: k1 -> k2 and b: k2 -> k1 are mutually inverse kar-morphisms."""
    t1, t2 = k1.t, k2.t
    return (
        kleisli_compose(t2, kleisli_compose(a, t1)) == a
        and kleisli_compose(t1, kleisli_compose(b, t2)) == b
        and kleisli_compose(b, a) == t1
        and kleisli_compose(a, b) == t2
    )


def _fixed_arrows(src: KarObject, tgt: KarObject) -> list[KleisliArrow]:
    out = []
    for a in kleisli_arrows(src.monad, src.carrier, tgt.carrier):
        if kleisli_compose(tgt.t, kleisli_compose(a, src.t)) == a:
            out.append(a)
    return out


def kar_isomorphism(k1: KarObject, k2: KarObject):
    """(a, b) exhibiting k1 and k2 as isomorphic in kar(X_T), or None."""
    A = _fixed_arrows(k1, k2)
    B = _fixed_arrows(k2, k1)
    for a in A:
        for b in B:
            if kleisli_compose(b, a) == k1.t and kleisli_compose(a, b) == k2.t:
                return a, b
    return None


def kar_isomorphic(k1: KarObject, k2: KarObject) -> bool:
    return kar_isomorphism(k1, k2) is not None


@dataclass
class KarSplit:
    algebra: Algebra
    splitting: Splitting | None
    # mutually inverse kar-morphisms between the input and (Y, t_Y)
    to_split: KleisliArrow | None
    from_split: KleisliArrow | None


def split_kar(k: KarObject) -> KarSplit:
    """Split the homomorphism t^ = m . T t on T X; its image is a split algebra."""
    T, X = k.monad, k.carrier
    that = k.t.extension()
    Y, r, s = split_idempotent(that)
    A = find_algebra_structure(T, Y)
    if A is None:
        raise PosetError("image of the idempotent carries no algebra structure")
    S = find_splitting(A)
    a = b = None
    if S is not None:
        ky = KarObject(Y, KleisliArrow(T, Y, Y, S.t))
        rho = MonotoneMap(X, Y, [r.values[v] for v in k.t.map.values], check=False)
        a = kleisli_compose(ky.t, to_kleisli(T, rho))
        b = KleisliArrow(T, Y, X, s)
        if not kar_iso_witnessed(k, ky, a, b):
            a = b = None
    return KarSplit(A, S, a, b)


def _kar_invariant(k: KarObject):
    """Isomorphism class of the fixed points of t^; preserved by kar-isomorphism."""
    that = k.t.extension()
    Y, _, _ = split_idempotent(that)
    return canonical_form(Y)


def kar_objects_on(T: Monad, X) -> list[KarObject]:
    X = as_poset(X)
    out = []
    for k in kleisli_arrows(T, X, X):
        if is_kar_object(T, X, k.map):
            out.append(KarObject(X, k))
    return out


def enumerate_kar(T: Monad, size_bound: int) -> list[KarObject]:
    """Objects of kar(X_T) on carriers of size <= size_bound, one per isomorphism class.

    Candidates are bucketed by an invariant and then compared with the
    definitional isomorphism search.
    """
    reps: dict = {}
    for X in T.base_objects(size_bound):
        try:
            cands = kar_objects_on(T, X)
        except SizeCapExceeded:
            continue
        for k in cands:
            bucket = reps.setdefault(_kar_invariant(k), [])
            if not any(kar_isomorphic(k, other) for other in bucket):
                bucket.append(k)
    return [k for bucket in reps.values() for k in bucket]


def split_algebra_kar_object(S: Splitting) -> KarObject:
    A = S.algebra
    return kar_object(A.monad, A.carrier, S.t)
