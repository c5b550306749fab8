"""Finite posets, monotone maps, adjoints and order-enriched limits in Pos.

Relations are stored as one bitmask row per element: bit ``j`` of ``up[i]``
is set iff ``i <= j``.  Everything here is immutable once built.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Hashable, Iterable, Iterator, Sequence


class Enrichment(Enum):
    """How hom-sets of a category instance are ordered."""

    POINTWISE = "pointwise"
    DUAL = "dual-pointwise"


POINTWISE = Enrichment.POINTWISE
DUAL = Enrichment.DUAL


class PosetError(ValueError):
    pass


class CycleError(PosetError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("antisymmetry violated by cycle " + " <= ".join(map(repr, self.cycle)))


class NotALattice(PosetError):
    pass


class NotIdempotent(PosetError):
    pass


class DiagramError(PosetError):
    pass


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(indices: Iterable[int]) -> int:
    """Bitmask of an iterable of indices; repeats are harmless."""
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Poset:
    __slots__ = ("elements", "up", "down", "_index", "_hash")

    def __init__(self, elements: Sequence[Hashable], up: Sequence[int]):
        # trusted constructor: ``up`` must already be a partial order
        self.elements = tuple(elements)
        self.up = tuple(up)
        n = len(self.elements)
        down = [0] * n
        for i, row in enumerate(self.up):
            for j in bits(row):
                down[j] |= 1 << i
        self.down = tuple(down)
        self._index = {x: i for i, x in enumerate(self.elements)}
        if len(self._index) != n:
            raise PosetError("element labels must be unique")
        self._hash = None

    @classmethod
    def from_leq(cls, elements, leq) -> "Poset":
        """Build from a predicate ``leq(a, b)`` on labels (assumed a partial order)."""
        elements = tuple(elements)
        up = []
        for a in elements:
            row = 0
            for j, b in enumerate(elements):
                if leq(a, b):
                    row |= 1 << j
            up.append(row)
        return cls(elements, up)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        return (
            isinstance(other, Poset)
            and self.elements == other.elements
            and self.up == other.up
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.elements, self.up))
        return self._hash

    def __repr__(self):
        covers = [
            (self.elements[i], self.elements[j]) for i, j in self.cover_pairs()
        ]
        return f"Poset({list(self.elements)!r}, covers={covers!r})"

    @property
    def full(self) -> int:
        return (1 << len(self.elements)) - 1

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise PosetError(f"{label!r} is not an element") from None

    def __contains__(self, label):
        return label in self._index

    def leq(self, i: int, j: int) -> bool:
        return bool((self.up[i] >> j) & 1)

    def le(self, a, b) -> bool:
        """Order test on labels."""
        return self.leq(self.index(a), self.index(b))

    def matrix(self) -> list[list[bool]]:
        n = len(self)
        return [[self.leq(i, j) for j in range(n)] for i in range(n)]

    def relation(self) -> list[tuple]:
        return [
            (self.elements[i], self.elements[j])
            for i in range(len(self))
            for j in bits(self.up[i])
        ]

    def cover_pairs(self) -> list[tuple[int, int]]:
        out = []
        for i in range(len(self)):
            strict = self.up[i] & ~(1 << i)
            for j in bits(strict):
                between = strict & self.down[j] & ~(1 << j)
                if not between:
                    out.append((i, j))
        return out

    def mask_of(self, labels: Iterable) -> int:
        m = 0
        for x in labels:
            m |= 1 << self.index(x)
        return m

    def labels_of(self, mask: int) -> frozenset:
        return frozenset(self.elements[i] for i in bits(mask))

    def upclosure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    def downclosure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def is_upset(self, mask: int) -> bool:
        return self.upclosure(mask) == mask

    def is_downset(self, mask: int) -> bool:
        return self.downclosure(mask) == mask

    def upper_bounds(self, mask: int) -> int:
        out = self.full
        for i in bits(mask):
            out &= self.up[i]
        return out

    def lower_bounds(self, mask: int) -> int:
        out = self.full
        for i in bits(mask):
            out &= self.down[i]
        return out

    def maximum(self, mask: int):
        """Index of the greatest element of the subset, or None."""
        for i in bits(mask):
            if self.down[i] & mask == mask:
                return i
        return None

    def minimum(self, mask: int):
        for i in bits(mask):
            if self.up[i] & mask == mask:
                return i
        return None

    def sup(self, mask: int):
        """Least upper bound of a subset, or None when it does not exist."""
        return self.minimum(self.upper_bounds(mask))

    def inf(self, mask: int):
        return self.maximum(self.lower_bounds(mask))

    def maximal(self, mask: int | None = None) -> int:
        mask = self.full if mask is None else mask
        return sum(1 << i for i in bits(mask) if self.up[i] & mask == 1 << i)

    def minimal(self, mask: int | None = None) -> int:
        mask = self.full if mask is None else mask
        return sum(1 << i for i in bits(mask) if self.down[i] & mask == 1 << i)

    def is_directed(self, mask: int) -> bool:
        if not mask:
            return False
        members = list(bits(mask))
        return all(
            self.up[a] & self.up[b] & mask for a, b in itertools.combinations(members, 2)
        )

    def linear_extension(self) -> list[int]:
        return sorted(range(len(self)), key=lambda i: (popcount(self.down[i]), i))

    def subposet(self, mask: int) -> "Poset":
        idx = list(bits(mask))
        pos = {old: new for new, old in enumerate(idx)}
        up = []
        for i in idx:
            row = 0
            for j in bits(self.up[i] & mask):
                row |= 1 << pos[j]
            up.append(row)
        return Poset([self.elements[i] for i in idx], up)

    def dual(self) -> "Poset":
        return Poset(self.elements, self.down)

    def relabel(self, labels: Sequence) -> "Poset":
        return Poset(labels, self.up)

    def permuted(self, order: Sequence[int], labels: Sequence | None = None) -> "Poset":
        """Reorder elements: new position k holds old element ``order[k]``."""
        pos = {old: new for new, old in enumerate(order)}
        up = []
        for old in order:
            row = 0
            for j in bits(self.up[old]):
                row |= 1 << pos[j]
            up.append(row)
        if labels is None:
            labels = [self.elements[i] for i in order]
        return Poset(labels, up)

    def downsets(self) -> list[int]:
        """All down-sets as masks, in a deterministic order."""
        return _enumerate_closed(self, self.down)

    def upsets(self) -> list[int]:
        return _enumerate_closed(self, self.up)

    def to_json(self) -> dict:
        return {
            "elements": [label_str(x) for x in self.elements],
            "le": [[label_str(a), label_str(b)] for (a, b) in self.relation() if a != b],
        }


def _enumerate_closed(P: Poset, closure_rows) -> list[int]:
    # include x only if its whole (down- or up-) closure is already in
    if closure_rows is P.down:
        order = P.linear_extension()
    else:
        order = list(reversed(P.linear_extension()))
    out = []
    n = len(order)

    def rec(k, acc):
        if k == n:
            out.append(acc)
            return
        x = order[k]
        need = closure_rows[x] & ~(1 << x)
        rec(k + 1, acc)
        if need & acc == need:
            rec(k + 1, acc | (1 << x))

    rec(0, 0)
    out.sort(key=lambda m: (popcount(m), m))
    return out


def label_str(x) -> str:
    """Stable human readable rendering of (possibly nested) labels."""
    if isinstance(x, str):
        return x
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(label_str(y) for y in x)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(label_str(y) for y in x) + ")"
    return str(x)


def make_poset(labels: Sequence[Hashable], pairs: Iterable[tuple]) -> Poset:
    """Reflexive-transitive closure of ``pairs`` over ``labels``.

    Raises CycleError when the closure is not antisymmetric.
    """
    labels = list(labels)
    index = {}
    for i, x in enumerate(labels):
        if x in index:
            raise PosetError(f"duplicate label {x!r}")
        index[x] = i
    n = len(labels)
    up = [1 << i for i in range(n)]
    edges: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b in pairs:
        if a not in index or b not in index:
            raise PosetError(f"pair ({a!r}, {b!r}) mentions an unknown label")
        i, j = index[a], index[b]
        up[i] |= 1 << j
        edges[i].append(j)
    for k in range(n):
        kb = 1 << k
        rk = up[k]
        for i in range(n):
            if up[i] & kb:
                up[i] |= rk
    for i in range(n):
        for j in bits(up[i] & ~(1 << i)):
            if (up[j] >> i) & 1:
                raise CycleError([labels[v] for v in _cycle(edges, i, j)])
    return Poset(labels, up)


def _cycle(edges, i, j):
    def path(src, dst):
        prev = {src: None}
        queue = deque([src])
        while queue:
            v = queue.popleft()
            if v == dst:
                break
            for w in edges[v]:
                if w not in prev:
                    prev[w] = v
                    queue.append(w)
        out = [dst]
        while out[-1] != src:
            out.append(prev[out[-1]])
        return out[::-1]

    return path(i, j) + path(j, i)[1:]


def chain(n: int) -> Poset:
    return Poset(range(n), [sum(1 << j for j in range(i, n)) for i in range(n)])


def antichain(n: int) -> Poset:
    return Poset(range(n), [1 << i for i in range(n)])


def singleton(label="*") -> Poset:
    return Poset([label], [1])


def empty() -> Poset:
    return Poset([], [])


def boolean_lattice(k: int) -> Poset:
    """Subsets of a k-set ordered by inclusion, labelled by bitmask ints."""
    n = 1 << k
    return Poset(range(n), [sum(1 << b for b in range(n) if a & ~b == 0) for a in range(n)])


def m3() -> Poset:
    return make_poset(["0", "a", "b", "c", "1"], [("0", x) for x in "abc"] + [(x, "1") for x in "abc"])


def n5() -> Poset:
    return make_poset(["0", "a", "b", "c", "1"], [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")])


# ---------------------------------------------------------------- maps


class MonotoneMap:
    """A map between finite posets given by element indices."""

    __slots__ = ("dom", "cod", "values", "_hash")

    def __init__(self, dom: Poset, cod: Poset, values: Sequence[int], check: bool = True):
        self.dom = dom
        self.cod = cod
        self.values = tuple(values)
        self._hash = None
        if check:
            if len(self.values) != len(dom):
                raise PosetError("assignment is not total")
            if any(not 0 <= v < len(cod) for v in self.values):
                raise PosetError("assignment leaves the codomain")
            bad = self.monotonicity_witness()
            if bad is not None:
                a, b = bad
                raise PosetError(
                    f"not monotone: {dom.elements[a]!r} <= {dom.elements[b]!r} "
                    "but the images are not ordered"
                )

    @classmethod
    def from_dict(cls, dom: Poset, cod: Poset, mapping) -> "MonotoneMap":
        return cls(dom, cod, [cod.index(mapping[x]) for x in dom.elements])

    @classmethod
    def identity(cls, P: Poset) -> "MonotoneMap":
        return cls(P, P, range(len(P)), check=False)

    @classmethod
    def constant(cls, dom: Poset, cod: Poset, label) -> "MonotoneMap":
        return cls(dom, cod, [cod.index(label)] * len(dom), check=False)

    def monotonicity_witness(self):
        v = self.values
        for i in range(len(self.dom)):
            row = self.cod.up[v[i]]
            for j in bits(self.dom.up[i]):
                if not (row >> v[j]) & 1:
                    return (i, j)
        return None

    def is_monotone(self) -> bool:
        return self.monotonicity_witness() is None

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __call__(self, label):
        return self.cod.elements[self.values[self.dom.index(label)]]

    def __matmul__(self, other: "MonotoneMap") -> "MonotoneMap":
        """``f @ g`` is f after g."""
        if other.cod != self.dom:
            raise PosetError("composition of non-composable maps")
        return MonotoneMap(other.dom, self.cod, [self.values[v] for v in other.values], check=False)

    def __eq__(self, other):
        return (
            isinstance(other, MonotoneMap)
            and self.values == other.values
            and self.dom == other.dom
            and self.cod == other.cod
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.values)
        return self._hash

    def __repr__(self):
        return f"MonotoneMap({self.as_dict()!r})"

    def as_dict(self) -> dict:
        return {self.dom.elements[i]: self.cod.elements[v] for i, v in enumerate(self.values)}

    def image_mask(self) -> int:
        m = 0
        for v in self.values:
            m |= 1 << v
        return m

    def preimage(self, mask: int) -> int:
        return sum(1 << i for i, v in enumerate(self.values) if (mask >> v) & 1)

    def is_injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def is_surjective(self) -> bool:
        return self.image_mask() == self.cod.full

    def is_order_reflecting(self) -> bool:
        v = self.values
        for i in range(len(self.dom)):
            for j in range(len(self.dom)):
                if self.cod.leq(v[i], v[j]) and not self.dom.leq(i, j):
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "dom": self.dom.to_json(),
            "cod": self.cod.to_json(),
            "map": {label_str(k): label_str(v) for k, v in self.as_dict().items()},
        }


def leq_maps(f: MonotoneMap, g: MonotoneMap, enrich: Enrichment = POINTWISE) -> bool:
    """``f <= g`` in the hom-order given by ``enrich``."""
    cod = f.cod
    if enrich is POINTWISE:
        return all(cod.leq(a, b) for a, b in zip(f.values, g.values))
    return all(cod.leq(b, a) for a, b in zip(f.values, g.values))


def is_adjunction(left: MonotoneMap, right: MonotoneMap, enrich: Enrichment = POINTWISE) -> bool:
    """``left -| right``: id <= right.left and left.right <= id, in the enriched order."""
    if left.dom != right.cod or left.cod != right.dom:
        return False
    X, Y = left.dom, left.cod
    return leq_maps(MonotoneMap.identity(X), right @ left, enrich) and leq_maps(
        left @ right, MonotoneMap.identity(Y), enrich
    )


def try_adjoint(f: MonotoneMap, side: str, enrich: Enrichment = POINTWISE):
    """The adjoint of ``f`` on ``side`` ('right' gives g with f -| g), or None.

    Under pointwise order the right adjoint is g(y) = max{x | f(x) <= y} and the
    left adjoint is g(y) = min{x | y <= f(x)}; the dual order swaps the sides.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    want_right = (side == "right") == (enrich is POINTWISE)
    X, Y = f.dom, f.cod
    values = []
    for y in range(len(Y)):
        if want_right:
            cand = sum(1 << x for x, v in enumerate(f.values) if Y.leq(v, y))
            best = X.maximum(cand)
        else:
            cand = sum(1 << x for x, v in enumerate(f.values) if Y.leq(y, v))
            best = X.minimum(cand)
        if best is None:
            return None
        values.append(best)
    g = MonotoneMap(Y, X, values, check=False)
    if not g.is_monotone():
        return None
    ok = is_adjunction(f, g, enrich) if side == "right" else is_adjunction(g, f, enrich)
    return g if ok else None


def enumerate_monotone_maps(P: Poset, Q: Poset) -> Iterator[MonotoneMap]:
    """All monotone maps P -> Q in a deterministic order."""
    order = P.linear_extension()
    n = len(order)
    lower = [list(bits(P.down[x] & ~(1 << x))) for x in order]
    values = [0] * len(P)
    full = Q.full

    def rec(k):
        if k == n:
            yield MonotoneMap(P, Q, values, check=False)
            return
        allowed = full
        for p in lower[k]:
            allowed &= Q.up[values[p]]
        x = order[k]
        for y in bits(allowed):
            values[x] = y
            yield from rec(k + 1)

    if n == 0:
        yield MonotoneMap(P, Q, [], check=False)
        return
    if not len(Q):
        return
    yield from rec(0)


def hom_poset(P: Poset, Q: Poset, enrich: Enrichment = POINTWISE, maps=None) -> tuple[Poset, list]:
    """Hom-set P -> Q as a poset in the enriched order; labels are value tuples."""
    maps = list(enumerate_monotone_maps(P, Q)) if maps is None else list(maps)
    labels = [m.values for m in maps]
    up = []
    for f in maps:
        up.append(sum(1 << j for j, g in enumerate(maps) if leq_maps(f, g, enrich)))
    return Poset(labels, up), maps


def is_order_mono(h: MonotoneMap) -> bool:
    """Order-mono, decided with the one-point probe (i.e. order-reflection)."""
    # maps 1 -> X are points, and both hom-orders compare them the same way
    X = h.dom
    for a in range(len(X)):
        for b in range(len(X)):
            if h.cod.leq(h.values[a], h.values[b]) and not X.leq(a, b):
                return False
    return True


def is_order_mono_probe(h: MonotoneMap, max_probe: int, enrich: Enrichment = POINTWISE) -> bool:
    """Definitional order-mono check over every probe A with |A| <= max_probe."""
    X = h.dom
    for k in range(max_probe + 1):
        for A in enumerate_posets(k):
            maps = list(enumerate_monotone_maps(A, X))
            comp = [h @ f for f in maps]
            for f, hf in zip(maps, comp):
                for g, hg in zip(maps, comp):
                    if leq_maps(hf, hg, enrich) and not leq_maps(f, g, enrich):
                        return False
    return True


def is_order_epi_bounded(h: MonotoneMap, max_probe: int | None = None, enrich: Enrichment = POINTWISE) -> bool:
    """Sound but incomplete order-epi test over probes B with |B| <= max_probe."""
    if max_probe is None:
        max_probe = len(h.cod) + 2
    return order_epi_witness(h, max_probe, enrich) is None


def order_epi_witness(h: MonotoneMap, max_probe: int, enrich: Enrichment = POINTWISE):
    Y = h.cod
    for k in range(max_probe + 1):
        for B in enumerate_posets(k):
            maps = list(enumerate_monotone_maps(Y, B))
            comp = [f @ h for f in maps]
            for f, fh in zip(maps, comp):
                for g, gh in zip(maps, comp):
                    if leq_maps(fh, gh, enrich) and not leq_maps(f, g, enrich):
                        return (f, g)
    return None


def is_epi_bounded(h: MonotoneMap, max_probe: int) -> bool:
    """Epimorphism test (f.h = g.h implies f = g) over probes |B| <= max_probe."""
    Y = h.cod
    for k in range(max_probe + 1):
        for B in enumerate_posets(k):
            seen = {}
            for f in enumerate_monotone_maps(Y, B):
                key = (f @ h).values
                if key in seen and seen[key] != f.values:
                    return False
                seen[key] = f.values
    return True


# ---------------------------------------------------------------- limits


def product(posets: Sequence[Poset]) -> tuple[Poset, list[MonotoneMap]]:
    posets = list(posets)
    idx_tuples = list(itertools.product(*[range(len(P)) for P in posets]))
    labels = [tuple(P.elements[i] for P, i in zip(posets, t)) for t in idx_tuples]
    up = []
    for t in idx_tuples:
        row = 0
        for j, s in enumerate(idx_tuples):
            if all(P.leq(a, b) for P, a, b in zip(posets, t, s)):
                row |= 1 << j
        up.append(row)
    prod = Poset(labels, up)
    projections = [
        MonotoneMap(prod, P, [t[k] for t in idx_tuples], check=False) for k, P in enumerate(posets)
    ]
    return prod, projections


def _inclusion(X: Poset, mask: int) -> tuple[Poset, MonotoneMap]:
    sub = X.subposet(mask)
    return sub, MonotoneMap(sub, X, list(bits(mask)), check=False)


def equalizer(f: MonotoneMap, g: MonotoneMap) -> tuple[Poset, MonotoneMap]:
    if f.dom != g.dom or f.cod != g.cod:
        raise PosetError("equalizer needs a parallel pair")
    mask = sum(1 << i for i in range(len(f.dom)) if f.values[i] == g.values[i])
    return _inclusion(f.dom, mask)


def inserter(f: MonotoneMap, g: MonotoneMap, enrich: Enrichment = POINTWISE) -> tuple[Poset, MonotoneMap]:
    """Sub-poset {x | f(x) <= g(x)} (with the enriched order on the point maps)."""
    if f.dom != g.dom or f.cod != g.cod:
        raise PosetError("inserter needs a parallel pair")
    Y = f.cod
    if enrich is POINTWISE:
        mask = sum(1 << i for i in range(len(f.dom)) if Y.leq(f.values[i], g.values[i]))
    else:
        mask = sum(1 << i for i in range(len(f.dom)) if Y.leq(g.values[i], f.values[i]))
    return _inclusion(f.dom, mask)


def factor_through(incl: MonotoneMap, h: MonotoneMap):
    """Unique k with incl . k = h, or None when h does not land in the image."""
    pos = {v: i for i, v in enumerate(incl.values)}
    try:
        vals = [pos[v] for v in h.values]
    except KeyError:
        return None
    return MonotoneMap(h.dom, incl.dom, vals)


def cotensor(I: Poset, X: Poset) -> tuple[Poset, dict]:
    """Monotone maps I -> X, pointwise ordered, with evaluation projections."""
    maps = list(enumerate_monotone_maps(I, X))
    labels = [tuple(X.elements[v] for v in m.values) for m in maps]
    up = []
    for f in maps:
        up.append(sum(1 << j for j, g in enumerate(maps) if leq_maps(f, g)))
    C = Poset(labels, up)
    projections = {
        I.elements[i]: MonotoneMap(C, X, [m.values[i] for m in maps], check=False) for i in range(len(I))
    }
    return C, projections


def jointly_order_monic(maps: Sequence[MonotoneMap]) -> bool:
    """A family out of L reflects order: x <= y iff every f(x) <= f(y)."""
    if not maps:
        return True
    L = maps[0].dom
    for x in range(len(L)):
        for y in range(len(L)):
            if all(f.cod.leq(f.values[x], f.values[y]) for f in maps) and not L.leq(x, y):
                return False
    return True


@dataclass(frozen=True)
class Shape:
    """A finite category: objects, named arrows, identities and composition."""

    objects: tuple
    arrows: dict  # name -> (src, tgt)
    identities: dict  # object -> arrow name
    compose: dict = field(default_factory=dict)  # (g, f) -> name of g.f

    def composite(self, g, f):
        if (g, f) in self.compose:
            return self.compose[(g, f)]
        if f == self.identities[self.arrows[f][0]] and self.arrows[g][0] == self.arrows[f][1]:
            return g
        if g == self.identities[self.arrows[g][1]] and self.arrows[g][0] == self.arrows[f][1]:
            return f
        raise DiagramError(f"composite {g}.{f} undefined")

    @classmethod
    def discrete(cls, objects) -> "Shape":
        objects = tuple(objects)
        arrows = {f"id_{o}": (o, o) for o in objects}
        return cls(objects, arrows, {o: f"id_{o}" for o in objects})

    @classmethod
    def unit(cls) -> "Shape":
        return cls.discrete(["*"])

    @classmethod
    def parallel_pair(cls) -> "Shape":
        arrows = {"id_a": ("a", "a"), "id_b": ("b", "b"), "f": ("a", "b"), "g": ("a", "b")}
        return cls(("a", "b"), arrows, {"a": "id_a", "b": "id_b"})


@dataclass(frozen=True)
class Diagram:
    shape: Shape
    objects: dict  # shape object -> Poset
    arrows: dict  # arrow name -> MonotoneMap

    def check_functorial(self):
        sh = self.shape
        for name, (s, t) in sh.arrows.items():
            m = self.arrows.get(name)
            if m is None:
                raise DiagramError(f"arrow {name} has no image")
            if m.dom != self.objects[s] or m.cod != self.objects[t]:
                raise DiagramError(f"arrow {name} has wrong endpoints")
        for o, ident in sh.identities.items():
            if self.arrows[ident] != MonotoneMap.identity(self.objects[o]):
                raise DiagramError(f"identity on {o} not preserved")
        for g, (gs, _) in sh.arrows.items():
            for f, (_, ft) in sh.arrows.items():
                if ft != gs:
                    continue
                h = sh.composite(g, f)
                if self.arrows[h] != self.arrows[g] @ self.arrows[f]:
                    raise DiagramError(f"composite {g}.{f} not preserved")


@dataclass
class WeightedLimit:
    apex: Poset
    projections: dict  # (shape object, weight label) -> MonotoneMap


def weighted_limit(D: Diagram, W: Diagram) -> WeightedLimit:
    """Limit of D weighted by W, as an equaliser between products of cotensors.

    An element is a family of monotone maps phi_d: W(d) -> D(d) natural in d.
    """
    if D.shape != W.shape:
        raise DiagramError("diagram and weight have different shapes")
    D.check_functorial()
    W.check_functorial()
    sh = D.shape
    cots = {d: cotensor(W.objects[d], D.objects[d]) for d in sh.objects}
    P, proj = product([cots[d][0] for d in sh.objects])
    pos = {d: k for k, d in enumerate(sh.objects)}

    def natural(k: int) -> bool:
        for name, (s, t) in sh.arrows.items():
            Dn, Wn = D.arrows[name], W.arrows[name]
            phi_s = proj[pos[s]].values[k]
            phi_t = proj[pos[t]].values[k]
            # maps as value tuples over W(s), W(t)
            fs = [D.objects[s].index(lbl) for lbl in cots[s][0].elements[phi_s]]
            ft = [D.objects[t].index(lbl) for lbl in cots[t][0].elements[phi_t]]
            for x in range(len(W.objects[s])):
                if Dn.values[fs[x]] != ft[Wn.values[x]]:
                    return False
        return True

    mask = sum(1 << k for k in range(len(P)) if natural(k))
    L, incl = _inclusion(P, mask)
    projections = {}
    for d in sh.objects:
        Cd, evals = cots[d]
        to_cd = proj[pos[d]] @ incl
        for x, ev in evals.items():
            projections[(d, x)] = ev @ to_cd
    return WeightedLimit(L, projections)


def split_idempotent(e: MonotoneMap) -> tuple[Poset, MonotoneMap, MonotoneMap]:
    """(Y, r, s) with r.s = id_Y and s.r = e; Y is the image of e."""
    if e.dom != e.cod or (e @ e).values != e.values:
        raise NotIdempotent("map is not an idempotent endomorphism")
    Y, s = _inclusion(e.dom, e.image_mask())
    pos = {v: i for i, v in enumerate(s.values)}
    r = MonotoneMap(e.dom, Y, [pos[v] for v in e.values], check=False)
    return Y, r, s


# ---------------------------------------------------------------- lattices


@dataclass(frozen=True)
class LatticeOps:
    poset: Poset
    is_lattice: bool
    top: int | None
    bottom: int | None
    _join: dict
    _meet: dict

    def join(self, a: int, b: int) -> int:
        r = self._join.get((a, b))
        if r is None:
            raise NotALattice(f"no join of {self.poset.elements[a]!r} and {self.poset.elements[b]!r}")
        return r

    def meet(self, a: int, b: int) -> int:
        r = self._meet.get((a, b))
        if r is None:
            raise NotALattice(f"no meet of {self.poset.elements[a]!r} and {self.poset.elements[b]!r}")
        return r

    def join_labels(self, a, b):
        P = self.poset
        return P.elements[self.join(P.index(a), P.index(b))]

    def meet_labels(self, a, b):
        P = self.poset
        return P.elements[self.meet(P.index(a), P.index(b))]

    def sup(self, mask: int) -> int:
        r = self.poset.sup(mask)
        if r is None:
            raise NotALattice("supremum missing")
        return r

    def inf(self, mask: int) -> int:
        r = self.poset.inf(mask)
        if r is None:
            raise NotALattice("infimum missing")
        return r


def lattice_ops(P: Poset) -> LatticeOps:
    n = len(P)
    join, meet = {}, {}
    ok = n > 0
    for a in range(n):
        for b in range(n):
            j = P.minimum(P.up[a] & P.up[b])
            m = P.maximum(P.down[a] & P.down[b])
            if j is None or m is None:
                ok = False
            if j is not None:
                join[(a, b)] = j
            if m is not None:
                meet[(a, b)] = m
    return LatticeOps(P, ok, P.maximum(P.full), P.minimum(P.full), join, meet)


def is_lattice(P: Poset) -> bool:
    return lattice_ops(P).is_lattice


def lattice_witness(P: Poset):
    """A pair of labels without join or meet, or None for lattices."""
    n = len(P)
    if n == 0:
        return {"reason": "empty poset has no top"}
    for a in range(n):
        for b in range(n):
            if P.minimum(P.up[a] & P.up[b]) is None:
                return {"missing": "join", "pair": [P.elements[a], P.elements[b]]}
            if P.maximum(P.down[a] & P.down[b]) is None:
                return {"missing": "meet", "pair": [P.elements[a], P.elements[b]]}
    return None


# ---------------------------------------------------------------- isomorphism


def _refined_colors(P: Poset) -> list:
    n = len(P)
    colors = [(popcount(P.down[i]), popcount(P.up[i])) for i in range(n)]
    for _ in range(n):
        sig = [
            (
                colors[i],
                tuple(sorted(colors[j] for j in bits(P.down[i]) if j != i)),
                tuple(sorted(colors[j] for j in bits(P.up[i]) if j != i)),
            )
            for i in range(n)
        ]
        ranks = {s: r for r, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(set(new)) == len(set(colors)):
            colors = new
            break
        colors = new
    # normalise to ranks
    ranks = {c: r for r, c in enumerate(sorted(set(colors)))}
    return [ranks[c] for c in colors]


@lru_cache(maxsize=None)
def canonical_order(P: Poset) -> tuple[tuple, tuple[int, ...]]:
    """(code, order): lexicographically least adjacency matrix among orderings
    that list elements by refined colour class; ``order`` achieves it."""
    n = len(P)
    colors = _refined_colors(P)
    classes = {}
    for i, c in enumerate(colors):
        classes.setdefault(c, []).append(i)
    class_lists = [classes[c] for c in sorted(classes)]
    best = None
    best_order = None
    for parts in itertools.product(*[itertools.permutations(c) for c in class_lists]):
        order = [i for part in parts for i in part]
        code = tuple(
            tuple(int(P.leq(order[a], order[b])) for b in range(n)) for a in range(n)
        )
        if best is None or code < best:
            best, best_order = code, tuple(order)
    if best is None:
        best, best_order = (), ()
    return (tuple(sorted(colors)), best), best_order


def canonical_form(P: Poset) -> tuple:
    return canonical_order(P)[0]


def canonical_poset(P: Poset) -> Poset:
    """Isomorphic copy labelled 0..n-1 in canonical order."""
    _, order = canonical_order(P)
    return P.permuted(order, labels=range(len(P)))


def are_isomorphic(P: Poset, Q: Poset) -> bool:
    return len(P) == len(Q) and canonical_form(P) == canonical_form(Q)


def isomorphisms(P: Poset, Q: Poset) -> Iterator[MonotoneMap]:
    """All order isomorphisms P -> Q, by backtracking on refined colours."""
    n = len(P)
    if n != len(Q):
        return
    cp, cq = _refined_colors(P), _refined_colors(Q)
    if sorted(cp) != sorted(cq):
        return
    order = P.linear_extension()
    values = [None] * n
    used = 0

    def rec(k):
        nonlocal used
        if k == n:
            yield MonotoneMap(P, Q, values, check=False)
            return
        x = order[k]
        for y in range(n):
            if (used >> y) & 1 or cq[y] != cp[x]:
                continue
            ok = True
            for p in order[:k]:
                if P.leq(p, x) != Q.leq(values[p], y) or P.leq(x, p) != Q.leq(y, values[p]):
                    ok = False
                    break
            if ok:
                values[x] = y
                used |= 1 << y
                yield from rec(k + 1)
                used &= ~(1 << y)
                values[x] = None

    yield from rec(0)


def find_isomorphism(P: Poset, Q: Poset):
    return next(isomorphisms(P, Q), None)


# ---------------------------------------------------------------- enumeration


@lru_cache(maxsize=None)
def _posets_of_size(n: int) -> tuple:
    if n == 0:
        return (empty(),)
    seen = {}
    for P in _posets_of_size(n - 1):
        for D in P.downsets():
            # new maximal element sitting above exactly the down-set D
            up = [row | (1 << (n - 1)) if (D >> i) & 1 else row for i, row in enumerate(P.up)]
            up.append(1 << (n - 1))
            Q = Poset(range(n), up)
            key = canonical_form(Q)
            if key not in seen:
                seen[key] = canonical_poset(Q)
    return tuple(seen[k] for k in sorted(seen))


def enumerate_posets(n: int) -> Iterator[Poset]:
    """Posets on n elements up to isomorphism, canonically labelled 0..n-1."""
    return iter(_posets_of_size(n))


def enumerate_lattices(n: int) -> Iterator[Poset]:
    return (P for P in enumerate_posets(n) if is_lattice(P))


def posets_up_to(n: int, start: int = 0) -> Iterator[Poset]:
    for k in range(start, n + 1):
        yield from enumerate_posets(k)


def lattices_up_to(n: int) -> Iterator[Poset]:
    for k in range(1, n + 1):
        yield from enumerate_lattices(k)


# ---------------------------------------------------------------- json


def poset_from_json(data: dict) -> Poset:
    return make_poset(list(data["elements"]), [tuple(p) for p in data.get("le", [])])


def map_from_json(data: dict) -> MonotoneMap:
    dom = poset_from_json(data["dom"])
    cod = poset_from_json(data["cod"])
    return MonotoneMap.from_dict(dom, cod, data["map"])
