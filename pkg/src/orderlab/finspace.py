"""Finite T0 spaces.

Convention: x <= y in the specialisation order iff every open containing x
also contains y, so opens are exactly the up-sets of that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .poset import DUAL, MonotoneMap, Poset, PosetError, bits, make_poset, label_str

# Top0 hom-sets carry the dual of the pointwise specialisation order
TOP0_ENRICHMENT = DUAL


class SpaceError(ValueError):
    pass


class NotT0(SpaceError):
    pass


class FinSpace:
    """A finite topological space: point labels and opens as bitmasks."""

    __slots__ = ("points", "opens", "_index")

    def __init__(self, points: Sequence, opens: Iterable[int]):
        self.points = tuple(points)
        self._index = {p: i for i, p in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise SpaceError("point labels must be unique")
        self.opens = frozenset(opens)
        full = (1 << len(self.points)) - 1
        if 0 not in self.opens or full not in self.opens:
            raise SpaceError("opens must contain the empty set and the whole space")
        for U in self.opens:
            if U & ~full:
                raise SpaceError("open set mentions unknown points")
            for V in self.opens:
                if U & V not in self.opens or U | V not in self.opens:
                    raise SpaceError("opens not closed under finite intersections and unions")

    @classmethod
    def from_sets(cls, points, opens) -> "FinSpace":
        index = {p: i for i, p in enumerate(points)}
        masks = []
        for U in opens:
            m = 0
            for p in U:
                if p not in index:
                    raise SpaceError(f"unknown point {p!r}")
                m |= 1 << index[p]
            masks.append(m)
        return cls(points, masks)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return isinstance(other, FinSpace) and self.points == other.points and self.opens == other.opens

    def __hash__(self):
        return hash((self.points, self.opens))

    def __repr__(self):
        return f"FinSpace({list(self.points)!r}, {len(self.opens)} opens)"

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def index(self, p) -> int:
        return self._index[p]

    def sorted_opens(self) -> list[int]:
        return sorted(self.opens, key=lambda m: (bin(m).count("1"), m))

    def open_sets(self) -> list[frozenset]:
        return [frozenset(self.points[i] for i in bits(U)) for U in self.sorted_opens()]

    def neighbourhood(self, i: int) -> int:
        """Smallest open containing point i."""
        m = self.full
        for U in self.opens:
            if (U >> i) & 1:
                m &= U
        return m

    def is_t0(self) -> bool:
        nbhd = [self.neighbourhood(i) for i in range(len(self))]
        return len(set(nbhd)) == len(nbhd)

    def closed_sets(self) -> list[int]:
        return sorted({self.full & ~U for U in self.opens})

    def closure(self, mask: int) -> int:
        best = self.full
        for C in self.closed_sets():
            if C & mask == mask:
                best &= C
        return best

    def to_json(self) -> dict:
        return {
            "points": [label_str(p) for p in self.points],
            "opens": [sorted(label_str(p) for p in U) for U in self.open_sets()],
        }


def specialization_poset(X: FinSpace) -> Poset:
    if not X.is_t0():
        raise NotT0("space is not T0: two points have the same neighbourhoods")
    return Poset(X.points, [X.neighbourhood(i) for i in range(len(X))])


def alexandrov(P: Poset) -> FinSpace:
    return FinSpace(P.elements, P.upsets())


def open_lattice(X: FinSpace) -> Poset:
    """Omega X ordered by inclusion; labels are frozensets of points."""
    opens = X.sorted_opens()
    labels = [frozenset(X.points[i] for i in bits(U)) for U in opens]
    up = [sum(1 << j for j, V in enumerate(opens) if U & ~V == 0) for U in opens]
    return Poset(labels, up)


def sierpinski() -> FinSpace:
    return FinSpace([0, 1], [0b00, 0b10, 0b11])


def generated_topology(points: Sequence, subbasis: Iterable[int]) -> FinSpace:
    """Coarsest topology containing the given subsets."""
    full = (1 << len(points)) - 1
    basis = {full}
    frontier = [full]
    sub = list(subbasis)
    while frontier:
        new = []
        for B in frontier:
            for S in sub:
                c = B & S
                if c not in basis:
                    basis.add(c)
                    new.append(c)
        frontier = new
    opens = {0}
    for B in basis:
        opens |= {U | B for U in opens}
    return FinSpace(points, opens)


@dataclass(frozen=True)
class ContinuousMap:
    dom: FinSpace
    cod: FinSpace
    values: tuple

    @classmethod
    def from_dict(cls, dom: FinSpace, cod: FinSpace, mapping) -> "ContinuousMap":
        return cls(dom, cod, tuple(cod.index(mapping[p]) for p in dom.points))

    def preimage(self, mask: int) -> int:
        return sum(1 << i for i, v in enumerate(self.values) if (mask >> v) & 1)

    def non_open_preimage(self):
        for V in self.cod.sorted_opens():
            if self.preimage(V) not in self.dom.opens:
                return V
        return None

    def to_monotone(self) -> MonotoneMap:
        return MonotoneMap(specialization_poset(self.dom), specialization_poset(self.cod), self.values)


def is_continuous(f: ContinuousMap) -> bool:
    return f.non_open_preimage() is None


def is_compact(X: FinSpace, mask: int) -> bool:
    """Every open cover of ``mask`` has a finite subcover.

    A cover is a subfamily of the finite family ``X.opens`` and is therefore
    its own finite subcover; what remains is that some cover exists.
    """
    cover = 0
    for U in X.opens:
        if U & mask:
            cover |= U
    return cover & mask == mask


def is_spectral_map(f: ContinuousMap) -> bool:
    if not is_continuous(f):
        return False
    for K in f.cod.opens:
        if is_compact(f.cod, K) and not is_compact(f.dom, f.preimage(K)):
            return False
    return True


def is_irreducible(X: FinSpace, closed: int) -> bool:
    if not closed:
        return False
    subs = [C for C in X.closed_sets() if C & ~closed == 0 and C != closed]
    for A in subs:
        for B in subs:
            if A | B == closed:
                return False
    return True


def generic_points(X: FinSpace, closed: int) -> list[int]:
    return [i for i in bits(closed) if X.closure(1 << i) == closed]


def is_sober(X: FinSpace) -> bool:
    for C in X.closed_sets():
        if is_irreducible(X, C) and len(generic_points(X, C)) != 1:
            return False
    return True


def as_poset(obj) -> Poset:
    """Posets pass through; finite spaces become their specialisation posets."""
    if isinstance(obj, Poset):
        return obj
    if isinstance(obj, FinSpace):
        return specialization_poset(obj)
    raise TypeError(f"expected Poset or FinSpace, got {type(obj).__name__}")


def space_from_json(data: dict) -> FinSpace:
    if "poset" in data:
        P = make_poset(list(data["poset"]["elements"]), [tuple(p) for p in data["poset"].get("le", [])])
        return alexandrov(P)
    X = FinSpace.from_sets(list(data["points"]), [list(U) for U in data["opens"]])
    if not X.is_t0():
        raise NotT0("space is not T0")
    return X


def space_or_poset_from_json(data: dict) -> Poset:
    """Accept poset JSON or space JSON; return the underlying poset."""
    if "elements" in data:
        return make_poset(list(data["elements"]), [tuple(p) for p in data.get("le", [])])
    try:
        return specialization_poset(space_from_json(data))
    except KeyError as exc:
        raise PosetError(f"missing field {exc}") from None
