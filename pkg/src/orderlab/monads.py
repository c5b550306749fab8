"""Concrete order-enriched monads and verifiers for the monad and KZ laws.

Every base object is handled through its underlying poset.  For Top0 that is
the specialisation order of a finite T0 space, which determines the space;
such instances carry the dual enrichment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .finspace import FinSpace, alexandrov, as_poset, generated_topology
from .poset import (
    DUAL,
    POINTWISE,
    Enrichment,
    MonotoneMap,
    Poset,
    PosetError,
    bits,
    enumerate_monotone_maps,
    is_adjunction,
    is_lattice,
    is_order_mono,
    leq_maps,
    popcount,
    posets_up_to,
    lattices_up_to,
)

POS = "Pos"
TOP0 = "Top0"
LAT_ALL = "CompleteLatticesAllMonotone"


class NotInBase(PosetError):
    pass


class SizeCapExceeded(RuntimeError):
    pass


class Monad:
    """Base class: subclasses build T-objects and describe their elements.

    ``_build(X)`` returns ``(TX, payload)``; payload is whatever the subclass
    needs to compute ``fmap``, ``unit`` and ``mult``.
    """

    name = "?"
    base = POS
    enrich: Enrichment = POINTWISE
    max_elements = 4096

    def __init__(self):
        self._cache = {}
        self._units = {}
        self._mults = {}

    def __repr__(self):
        return f"<monad {self.name} on {self.base}>"

    def contains(self, X) -> bool:
        return True

    def _entry(self, X):
        X = as_poset(X)
        hit = self._cache.get(X)
        if hit is None:
            if not self.contains(X):
                raise NotInBase(f"{X!r} is not an object of {self.base}")
            hit = self._build(X)
            self._cache[X] = hit
        return hit

    def obj(self, X) -> Poset:
        return self._entry(X)[0]

    def base_objects(self, max_size: int):
        if self.base == LAT_ALL:
            return list(lattices_up_to(max_size))
        return list(posets_up_to(max_size))

    def is_morphism(self, f: MonotoneMap) -> bool:
        return f.is_monotone()

    # subclasses implement
    def _build(self, X: Poset):
        raise NotImplementedError

    def fmap(self, f: MonotoneMap) -> MonotoneMap:
        raise NotImplementedError

    def unit(self, X) -> MonotoneMap:
        X = as_poset(X)
        if X not in self._units:
            self._units[X] = self._unit(X)
        return self._units[X]

    def mult(self, X) -> MonotoneMap:
        X = as_poset(X)
        if X not in self._mults:
            self._mults[X] = self._mult(X)
        return self._mults[X]

    def _unit(self, X: Poset) -> MonotoneMap:
        raise NotImplementedError

    def _mult(self, X: Poset) -> MonotoneMap:
        raise NotImplementedError


def _subset_order(masks) -> list[int]:
    return [sum(1 << j for j, b in enumerate(masks) if a & ~b == 0) for a in masks]


class DownsetMonad(Monad):
    """D on Pos: down-sets ordered by inclusion, unit x -> down x, mult = union."""

    name = "D"
    base = POS
    enrich = POINTWISE

    def _carrier(self, X: Poset) -> list[int]:
        return X.downsets()

    def _build(self, X: Poset):
        masks = self._carrier(X)
        if len(masks) > self.max_elements:
            raise SizeCapExceeded(f"T X would have {len(masks)} elements")
        labels = [X.labels_of(m) for m in masks]
        TX = Poset(labels, _subset_order(masks))
        return TX, masks, {m: i for i, m in enumerate(masks)}

    def fmap(self, f: MonotoneMap) -> MonotoneMap:
        TX, masks, _ = self._entry(f.dom)
        TY, _, where = self._entry(f.cod)
        vals = []
        for A in masks:
            img = 0
            for x in bits(A):
                img |= f.cod.down[f.values[x]]
            if img not in where:
                raise PosetError("image of a T-element left T Y")
            vals.append(where[img])
        return MonotoneMap(TX, TY, vals, check=False)

    def _unit(self, X) -> MonotoneMap:
        TX, _, where = self._entry(X)
        return MonotoneMap(X, TX, [where[X.down[x]] for x in range(len(X))], check=False)

    def _mult(self, X) -> MonotoneMap:
        TX, masks, where = self._entry(X)
        TTX, outer, _ = self._entry(TX)
        vals = []
        for A in outer:
            u = 0
            for i in bits(A):
                u |= masks[i]
            vals.append(where[u])
        return MonotoneMap(TTX, TX, vals, check=False)


class IdealMonad(DownsetMonad):
    """I on Pos: directed down-sets."""

    name = "I"

    def _carrier(self, X: Poset) -> list[int]:
        return [m for m in X.downsets() if X.is_directed(m)]


# ---------------------------------------------------------------- filters


@dataclass
class OpenLattice:
    """Omega X of a finite space given by its specialisation poset."""

    opens: list  # masks over points, index order = lattice index
    where: dict
    up: list  # up[i]: mask over open indices of opens containing open i
    full_index: int
    empty_index: int

    @classmethod
    def of(cls, X: Poset) -> "OpenLattice":
        opens = X.upsets()
        where = {m: i for i, m in enumerate(opens)}
        up = _subset_order(opens)
        return cls(opens, where, up, where[X.full], where[0])

    def __len__(self):
        return len(self.opens)

    def meet_index(self, a: int, b: int) -> int:
        return self.where[self.opens[a] & self.opens[b]]

    def join_index(self, a: int, b: int) -> int:
        return self.where[self.opens[a] | self.opens[b]]

    def generated_filter(self, S: int) -> int:
        """Least filter containing the open-index set S."""
        m = self.opens[self.full_index]
        for i in bits(S):
            m &= self.opens[i]
        return self.up[self.where[m]]

    def is_filter(self, F: int) -> bool:
        if not (F >> self.full_index) & 1:
            return False
        for i in bits(F):
            if self.up[i] & ~F:
                return False
            for j in bits(F):
                if not (F >> self.meet_index(i, j)) & 1:
                    return False
        return True

    def is_proper(self, F: int) -> bool:
        return not (F >> self.empty_index) & 1

    def is_prime(self, F: int) -> bool:
        """Proper, and a binary union in F has a member in F."""
        if not self.is_proper(F):
            return False
        n = len(self.opens)
        for a in range(n):
            if (F >> a) & 1:
                continue
            for b in range(n):
                if (F >> b) & 1:
                    continue
                if (F >> self.join_index(a, b)) & 1:
                    return False
        return True

    def is_completely_prime(self, F: int) -> bool:
        """Any family (possibly empty) whose union lies in F has a member in F.

        A family avoiding F with union W exists iff the union of all opens
        below W that avoid F is W itself.
        """
        for w in bits(F):
            W = self.opens[w]
            u = 0
            for i, U in enumerate(self.opens):
                if U & ~W == 0 and not (F >> i) & 1:
                    u |= U
            if u == W:
                return False
        return True

    def principal(self, i: int) -> int:
        return self.up[i]


def next_closure(n: int, closure):
    """Ganter's NextClosure: every closed subset of range(n), in lectic order."""
    A = closure(0)
    yield A
    full = (1 << n) - 1
    while A != full:
        for i in reversed(range(n)):
            bit = 1 << i
            if A & bit:
                A &= ~bit
                continue
            B = closure(A | bit)
            if (B & ~A) & (bit - 1) == 0:
                A = B
                yield A
                break
        else:
            return


def enumerate_filters(L: OpenLattice) -> list[int]:
    return sorted(next_closure(len(L), L.generated_filter), key=lambda m: (popcount(m), m))


def enumerate_filters_bruteforce(X: Poset) -> list[frozenset]:
    """Meet-closed up-sets of (Omega X, subset) containing X, by enumerating
    every up-set of the open lattice.  Independent of ``enumerate_filters``."""
    opens = X.upsets()
    full = X.full
    lattice = Poset(range(len(opens)), _subset_order(opens))
    out = []
    for U in lattice.upsets():
        members = [opens[i] for i in bits(U)]
        if full not in members:
            continue
        ok = all((a & b) in members for a in members for b in members)
        if ok:
            out.append(frozenset(members))
    return out


FILTER_KINDS = ("F", "F1", "F2", "Fc")


class FilterMonad(Monad):
    """Filters of open sets on finite T0 spaces; F1/F2/Fc restrict the carrier."""

    base = TOP0
    enrich = DUAL

    def __init__(self, kind: str = "F"):
        super().__init__()
        if kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter monad {kind!r}")
        self.kind = kind
        self.name = kind

    def accepts(self, L: OpenLattice, F: int) -> bool:
        if self.kind == "F":
            return True
        if self.kind == "F1":
            return L.is_proper(F)
        if self.kind == "F2":
            return L.is_prime(F)
        return L.is_completely_prime(F)

    def _build(self, X: Poset):
        L = OpenLattice.of(X)
        filters = [F for F in enumerate_filters(L) if self.accepts(L, F)]
        if len(filters) > self.max_elements:
            raise SizeCapExceeded(f"T X would have {len(filters)} elements")
        open_labels = [X.labels_of(U) for U in L.opens]
        labels = [frozenset(open_labels[i] for i in bits(F)) for F in filters]
        TX = Poset(labels, _subset_order(filters))
        return TX, L, filters, {F: i for i, F in enumerate(filters)}

    def open_lattice(self, X) -> OpenLattice:
        return self._entry(X)[1]

    def filter_masks(self, X) -> list[int]:
        return self._entry(X)[2]

    def fmap(self, f: MonotoneMap) -> MonotoneMap:
        TX, LX, fx, _ = self._entry(f.dom)
        TY, LY, _, where = self._entry(f.cod)
        pre = [LX.where[f.preimage(V)] for V in LY.opens]
        vals = []
        for F in fx:
            G = sum(1 << b for b, a in enumerate(pre) if (F >> a) & 1)
            if G not in where:
                raise PosetError("F f left the carrier")
            vals.append(where[G])
        return MonotoneMap(TX, TY, vals, check=False)

    def _unit(self, X) -> MonotoneMap:
        TX, L, _, where = self._entry(X)
        vals = []
        for x in range(len(X)):
            nb = sum(1 << i for i, U in enumerate(L.opens) if (U >> x) & 1)
            vals.append(where[nb])
        return MonotoneMap(X, TX, vals, check=False)

    def sharp(self, X, open_index: int) -> int:
        """A^# as a mask over the elements of T X."""
        _, _, fx, _ = self._entry(X)
        return sum(1 << k for k, F in enumerate(fx) if (F >> open_index) & 1)

    def _mult(self, X) -> MonotoneMap:
        TX, L, fx, where = self._entry(X)
        TTX, LT, ffx, _ = self._entry(TX)
        sharp_idx = [LT.where[self.sharp(X, a)] for a in range(len(L))]
        vals = []
        for G in ffx:
            F = sum(1 << a for a, s in enumerate(sharp_idx) if (G >> s) & 1)
            vals.append(where[F])
        return MonotoneMap(TTX, TX, vals, check=False)

    def space(self, X) -> FinSpace:
        """T X with the topology generated by the sets A^#."""
        TX, L, _, _ = self._entry(X)
        return generated_topology(TX.elements, [self.sharp(X, a) for a in range(len(L))])


# ---------------------------------------------------------------- adjoin bounds


BOT = ("bot",)
TOP = ("top",)


class AdjoinBoundsMonad(Monad):
    """Freely adjoin a new bottom and top; base: finite lattices, all monotone maps."""

    name = "AdjoinBounds"
    base = LAT_ALL
    enrich = POINTWISE

    def contains(self, X) -> bool:
        return is_lattice(as_poset(X))

    def _build(self, X: Poset):
        n = len(X)
        labels = [BOT] + [("in", x) for x in X.elements] + [TOP]
        up = [(1 << (n + 2)) - 1]
        for i in range(n):
            up.append((X.up[i] << 1) | (1 << (n + 1)))
        up.append(1 << (n + 1))
        return (Poset(labels, up),)

    def fmap(self, f: MonotoneMap) -> MonotoneMap:
        TX, TY = self.obj(f.dom), self.obj(f.cod)
        m = len(f.cod)
        vals = [0] + [v + 1 for v in f.values] + [m + 1]
        return MonotoneMap(TX, TY, vals, check=False)

    def _unit(self, X) -> MonotoneMap:
        return MonotoneMap(X, self.obj(X), [i + 1 for i in range(len(X))], check=False)

    def _mult(self, X) -> MonotoneMap:
        TX = self.obj(X)
        TTX = self.obj(TX)
        k = len(TX)
        # TTX = [bot', bot, x..., top, top']
        vals = [0] + list(range(k)) + [k - 1]
        return MonotoneMap(TTX, TX, vals, check=False)


def downset_monad() -> DownsetMonad:
    return DownsetMonad()


def ideal_monad() -> IdealMonad:
    return IdealMonad()


def filter_monad(kind: str = "F") -> FilterMonad:
    return FilterMonad(kind)


def adjoin_bounds_monad() -> AdjoinBoundsMonad:
    return AdjoinBoundsMonad()


MONAD_FACTORIES = {
    "D": downset_monad,
    "I": ideal_monad,
    "F": lambda: filter_monad("F"),
    "F1": lambda: filter_monad("F1"),
    "F2": lambda: filter_monad("F2"),
    "Fc": lambda: filter_monad("Fc"),
    "adjbounds": adjoin_bounds_monad,
    "AdjoinBounds": adjoin_bounds_monad,
}


def get_monad(name: str) -> Monad:
    try:
        return MONAD_FACTORIES[name]()
    except KeyError:
        raise ValueError(f"unknown monad {name!r}; choose from D, I, F, F1, F2, Fc, adjbounds") from None


# ---------------------------------------------------------------- verifiers


@dataclass
class LawReport:
    holds: bool
    checked: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # (law, witness label)
    skipped: list = field(default_factory=list)


def _first_difference(f: MonotoneMap, g: MonotoneMap):
    for i, (a, b) in enumerate(zip(f.values, g.values)):
        if a != b:
            return f.dom.elements[i]
    return None


ASSOC_CAP = 24


def verify_monad_laws(T: Monad, X, assoc_cap: int | None = ASSOC_CAP) -> LawReport:
    """m.Te = id, m.eT = id on TX; m.Tm = m.mT on TTTX when |TTX| <= assoc_cap.

    The associativity square lives on T applied three times, which for the
    down-set monad is exponential in |TTX|; past the cap it is reported as
    skipped rather than attempted.
    """
    X = as_poset(X)
    rep = LawReport(True)
    TX = T.obj(X)
    m = T.mult(X)
    ident = MonotoneMap.identity(TX)
    for law, lhs in (("m.Te=id", m @ T.fmap(T.unit(X))), ("m.eT=id", m @ T.unit(TX))):
        rep.checked.append(law)
        w = _first_difference(lhs, ident)
        if w is not None:
            rep.holds = False
            rep.failures.append((law, w))
    TTX = T.obj(TX)
    if assoc_cap is not None and len(TTX) > assoc_cap:
        rep.skipped.append("m.Tm=m.mT")
        return rep
    try:
        lhs = m @ T.fmap(m)
        rhs = m @ T.mult(TX)
    except SizeCapExceeded:
        rep.skipped.append("m.Tm=m.mT")
        return rep
    rep.checked.append("m.Tm=m.mT")
    w = _first_difference(lhs, rhs)
    if w is not None:
        rep.holds = False
        rep.failures.append(("m.Tm=m.mT", w))
    return rep


def verify_naturality(T: Monad, f: MonotoneMap) -> dict:
    """Naturality squares of e and m at f, and functoriality on identities."""
    X, Y = f.dom, f.cod
    Tf = T.fmap(f)
    return {
        "unit": (T.unit(Y) @ f).values == (Tf @ T.unit(X)).values,
        "mult": (T.mult(Y) @ T.fmap(Tf)).values == (Tf @ T.mult(X)).values,
        "identity": T.fmap(MonotoneMap.identity(X)) == MonotoneMap.identity(T.obj(X)),
    }


@dataclass
class KZReport:
    cond_i: bool  # T e_X <= e_TX
    cond_ii: bool  # m_X -| e_TX
    cond_iii: bool  # T e_X -| m_X

    @property
    def agree(self) -> bool:
        return self.cond_i == self.cond_ii == self.cond_iii

    def as_dict(self) -> dict:
        return {"cond_i": self.cond_i, "cond_ii": self.cond_ii, "cond_iii": self.cond_iii}


def verify_kz(T: Monad, X) -> KZReport:
    X = as_poset(X)
    TX = T.obj(X)
    Te = T.fmap(T.unit(X))
    eT = T.unit(TX)
    m = T.mult(X)
    return KZReport(
        cond_i=leq_maps(Te, eT, T.enrich),
        cond_ii=is_adjunction(m, eT, T.enrich),
        cond_iii=is_adjunction(Te, m, T.enrich),
    )


@dataclass
class FaithfulReport:
    order_faithful: bool
    units_order_mono: bool
    witness: tuple | None = None

    @property
    def agree(self) -> bool:
        return self.order_faithful == self.units_order_mono


def is_order_faithful(T: Monad, bound: int) -> FaithfulReport:
    """Tf <= Tg implies f <= g over all maps between base objects of size <= bound,
    cross-checked against e_X being order-mono on the same objects."""
    objs = T.base_objects(bound)
    faithful = True
    witness = None
    for A in objs:
        for X in objs:
            maps = [f for f in enumerate_monotone_maps(A, X) if T.is_morphism(f)]
            images = [T.fmap(f) for f in maps]
            for f, Tf in zip(maps, images):
                for g, Tg in zip(maps, images):
                    if leq_maps(f, g, T.enrich):
                        continue
                    if leq_maps(Tf, Tg, T.enrich):
                        faithful = False
                        witness = (f, g)
                        break
                if not faithful:
                    break
            if not faithful:
                break
        if not faithful:
            break
    monos = all(is_order_mono(T.unit(X)) for X in objs)
    return FaithfulReport(faithful, monos, witness)


def filter_space_is_alexandrov(T: FilterMonad, X) -> bool:
    """The topology generated by the A^# equals the up-set topology of T X."""
    return T.space(X) == alexandrov(T.obj(X))
