"""Double dualisation into the Sierpinski space for three classes of finite
spaces (algebraic lattices, bounded complete domains, spectral spaces),
together with the order-enriched limit and colimit checks around it.

Spaces are handled through their specialisation posets: a finite T0 space
is Alexandrov, so its opens are the up-sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .finspace import as_poset
from .poset import (
    MonotoneMap,
    Poset,
    PosetError,
    bits,
    cotensor,
    enumerate_monotone_maps,
    inserter,
    is_lattice,
    make_poset,
    posets_up_to,
    product,
    to_mask,
)

LAMBDA_CAP = 12
HAT_LAMBDA_CAP = 5000


class NotInClass(PosetError):
    pass


class CapExceeded(RuntimeError):
    pass


def sierpinski_poset() -> Poset:
    return make_poset([0, 1], [(0, 1)])


S2 = sierpinski_poset()


def _preserves_binary_meets(f: MonotoneMap) -> bool:
    X, Y = f.dom, f.cod
    n = len(X)
    for a in range(n):
        for b in range(a + 1, n):
            m = X.inf((1 << a) | (1 << b))
            if m is None:
                continue
            fm = Y.inf((1 << f.values[a]) | (1 << f.values[b]))
            if fm is None or fm != f.values[m]:
                return False
    return True


def _has_all_nonempty_infima(P: Poset) -> bool:
    return all(P.inf((1 << a) | (1 << b)) is not None for a in range(len(P)) for b in range(len(P)))


def _is_alat(P: Poset) -> bool:
    return len(P) > 0 and is_lattice(P)


def _is_adom(P: Poset) -> bool:
    # finite: bounded complete iff every nonempty subset has an infimum
    return len(P) == 0 or (_has_all_nonempty_infima(P) and P.minimum(P.full) is not None)


def _alat_hom(f: MonotoneMap) -> bool:
    # finite lattices: all infima = the empty one (top) and binary ones;
    # directed suprema are preserved by any monotone map
    if not f.is_monotone():
        return False
    top = f.dom.maximum(f.dom.full)
    if top is not None and f.values[top] != f.cod.maximum(f.cod.full):
        return False
    return _preserves_binary_meets(f)


def _adom_hom(f: MonotoneMap) -> bool:
    return f.is_monotone() and _preserves_binary_meets(f)


def compact_upset(P: Poset, U: int) -> bool:
    """An open of an Alexandrov space is compact iff it is the up-closure of
    finitely many points; its minimal elements are the candidates."""
    return P.upclosure(P.minimal(U)) == U


def _spec_hom(f: MonotoneMap) -> bool:
    """Continuous, and preimages of compact opens are compact."""
    if not f.is_monotone():
        return False
    for V in f.cod.upsets():
        if compact_upset(f.cod, V) and not compact_upset(f.dom, f.preimage(V)):
            return False
    return True


@dataclass(frozen=True)
class CategoryClass:
    name: str
    is_object: Callable[[Poset], bool]
    is_morphism: Callable[[MonotoneMap], bool]

    def __repr__(self):
        return self.name

    def objects(self, max_size: int) -> list[Poset]:
        return [P for P in posets_up_to(max_size) if self.is_object(P)]

    def morphisms(self, X: Poset, Y: Poset) -> list[MonotoneMap]:
        return [f for f in enumerate_monotone_maps(X, Y) if self.is_morphism(f)]


ALAT = CategoryClass("ALat", _is_alat, _alat_hom)
ADOM = CategoryClass("ADom", _is_adom, _adom_hom)
SPEC = CategoryClass("Spec", lambda P: True, _spec_hom)
CLASSES = {"alat": ALAT, "adom": ADOM, "spec": SPEC}


def characteristic(P: Poset, U: int) -> MonotoneMap:
    return MonotoneMap(P, S2, [(U >> x) & 1 for x in range(len(P))], check=False)


def in_lambda(P: Poset, U: int, C: CategoryClass) -> bool:
    return P.is_upset(U) and C.is_morphism(characteristic(P, U))


def lambda_opens(X, C: CategoryClass) -> list[int]:
    """Opens whose characteristic map into S is a morphism of C, sorted."""
    P = as_poset(X)
    if not C.is_object(P):
        raise NotInClass(f"object is not in {C.name}")
    return [U for U in P.upsets() if in_lambda(P, U, C)]


@dataclass
class LambdaReport:
    opens: list
    meet_closed: bool
    contains_full: bool
    is_base: bool


def check_lambda(X, C: CategoryClass) -> LambdaReport:
    """Lambda X is closed under finite intersections and is a base of the topology."""
    P = as_poset(X)
    lam = lambda_opens(P, C)
    ls = set(lam)
    meet_closed = all((U & V) in ls for U in lam for V in lam)
    base = True
    for U in P.upsets():
        cover = 0
        for V in lam:
            if V & ~U == 0:
                cover |= V
        if cover != U:
            base = False
            break
    return LambdaReport(lam, meet_closed, P.full in ls, base)


@dataclass
class Hat:
    """X^ = monotone families (z_U) over (Lambda X, inclusion), with n_X."""

    X: Poset
    lam: list  # masks over X
    lam_poset: Poset
    hat: Poset
    n: MonotoneMap

    def z(self, k: int, u: int) -> int:
        return self.hat.elements[k][u]

    def diamond(self, u: int) -> int:
        """The subbasic open {z | z_U = 1}, as a mask over X^."""
        return to_mask(k for k in range(len(self.hat)) if self.z(k, u))


def build_hat(X, C: CategoryClass, lam: list | None = None) -> Hat:
    P = as_poset(X)
    if lam is None:
        lam = lambda_opens(P, C)
    if len(lam) > LAMBDA_CAP:
        raise CapExceeded(f"|Lambda X| = {len(lam)} exceeds the cap of {LAMBDA_CAP}")
    lam_poset = Poset(
        [P.labels_of(U) for U in lam],
        [to_mask(j for j, V in enumerate(lam) if U & ~V == 0) for U in lam],
    )
    hat, _ = cotensor(lam_poset, S2)
    where = {lbl: k for k, lbl in enumerate(hat.elements)}
    vals = [where[tuple((U >> x) & 1 for U in lam)] for x in range(len(P))]
    return Hat(P, list(lam), lam_poset, hat, MonotoneMap(P, hat, vals, check=False))


@dataclass
class HatReport:
    n_continuous: bool
    preimages_recover: bool  # U = n^-1(diamond U)
    subbasis_generates: bool  # diamonds generate the up-set topology of X^
    n_embedding: bool


def check_hat(H: Hat) -> HatReport:
    diamonds = [H.diamond(u) for u in range(len(H.lam))]
    recover = all(H.n.preimage(D) == U for D, U in zip(diamonds, H.lam))
    gen = all(H.hat.is_upset(D) for D in diamonds)
    if gen:
        for k in range(len(H.hat)):
            m = H.hat.full
            for D in diamonds:
                if (D >> k) & 1:
                    m &= D
            if m != H.hat.up[k]:
                gen = False
                break
    emb = H.n.is_injective() and H.n.is_order_reflecting()
    return HatReport(H.n.is_monotone(), recover, gen, emb)


@dataclass
class CogenCertificate:
    equaliser: bool
    image: list = field(default_factory=list)  # labels of n_X(X) inside X^
    equaliser_set: list = field(default_factory=list)
    cone: bool = True
    n_embedding: bool = True
    failure: str | None = None
    sizes: dict = field(default_factory=dict)


def build_alpha_beta(H: Hat, C: CategoryClass):
    """(alpha, beta, lam_hat): alpha(z)_G = [z in G] and beta(z)_G = z at n^-1(G),
    for G in Lambda X^; values are masks over the indices of lam_hat.

    beta is None when some n^-1(G) falls outside Lambda X.
    """
    hat = H.hat
    if not C.is_object(hat):
        raise NotInClass(f"X^ is not an object of {C.name}")
    lam_hat = []
    for G in hat.upsets():
        if in_lambda(hat, G, C):
            lam_hat.append(G)
            if len(lam_hat) > HAT_LAMBDA_CAP:
                raise CapExceeded(f"|Lambda X^| exceeds {HAT_LAMBDA_CAP}")
    alpha = [to_mask(g for g, G in enumerate(lam_hat) if (G >> k) & 1) for k in range(len(hat))]
    where = {U: u for u, U in enumerate(H.lam)}
    idx = []
    for G in lam_hat:
        pre = H.n.preimage(G)
        if pre not in where:
            return alpha, None, lam_hat
        idx.append(where[pre])
    beta = [to_mask(g for g, u in enumerate(idx) if H.z(k, u)) for k in range(len(hat))]
    return alpha, beta, lam_hat


def is_regular_cogenerator_instance(X, C: CategoryClass, lam: list | None = None) -> CogenCertificate:
    """n_X maps X isomorphically onto the equaliser of alpha and beta."""
    H = build_hat(X, C, lam)
    rep = check_hat(H)
    alpha, beta, lam_hat = build_alpha_beta(H, C)
    sizes = {"lambda": len(H.lam), "hat": len(H.hat), "lambda_hat": len(lam_hat)}
    image = H.n.image_mask()
    img_labels = [H.hat.elements[k] for k in bits(image)]
    if beta is None:
        return CogenCertificate(False, img_labels, [], False, rep.n_embedding, "beta_undefined", sizes)
    eq = to_mask(k for k in range(len(H.hat)) if alpha[k] == beta[k])
    cone = image & ~eq == 0
    ok = eq == image and rep.n_embedding and rep.preimages_recover
    failure = None
    if not ok:
        failure = "not_embedding" if not rep.n_embedding else "equaliser_differs"
    return CogenCertificate(ok, img_labels, [H.hat.elements[k] for k in bits(eq)], cone, rep.n_embedding, failure, sizes)


def corrupted_lambda(X, C: CategoryClass) -> list[int]:
    """Lambda X with one open added that is not a class morphism's preimage,
    or, when every open qualifies, with its largest proper member removed."""
    P = as_poset(X)
    lam = lambda_opens(P, C)
    outside = [U for U in P.upsets() if U not in lam]
    if outside:
        return sorted(set(lam) | {outside[0]})
    inner = [U for U in lam if U != P.full]
    if not inner:
        raise ValueError("Lambda X has no proper member to drop")
    return [U for U in lam if U != inner[-1]]


# ---------------------------------------------------------------- condition (iv)


@dataclass
class UnionLiftReport:
    holds: bool
    families: int
    witness: tuple | None = None


def union_lift_condition(X, C: CategoryClass) -> UnionLiftReport:
    """For every family V_i in Lambda X whose union H is in Lambda X, there is
    H' in Lambda X^ with H = n^-1(H') and H' inside the union of the diamonds."""
    H = build_hat(X, C)
    P, lam, hat = H.X, H.lam, H.hat
    ls = set(lam)
    diamonds = [H.diamond(u) for u in range(len(lam))]
    count = 0
    for fam in range(1 << len(lam)):
        members = list(bits(fam))
        union = to_mask([])
        for i in members:
            union |= lam[i]
        if union not in ls:
            continue
        count += 1
        if C is SPEC:
            # drop members covered by the rest until the subfamily is irredundant
            J = list(members)
            for i in list(J):
                rest = 0
                for j in J:
                    if j != i:
                        rest |= lam[j]
                if rest == union:
                    J.remove(i)
            Hp = 0
            for j in J:
                Hp |= diamonds[j]
        elif union == 0:
            Hp = 0
        else:
            a = P.inf(union)
            i0 = next(i for i in members if (lam[i] >> a) & 1)
            Hp = diamonds[i0]
        bound = 0
        for i in members:
            bound |= diamonds[i]
        ok = in_lambda(hat, Hp, C) and H.n.preimage(Hp) == union and Hp & ~bound == 0
        if not ok:
            return UnionLiftReport(False, count, (members, Hp))
    return UnionLiftReport(True, count)


# ---------------------------------------------------------------- cogenerator, closure


def is_order_cogenerator(C: CategoryClass, bound: int):
    """Maps into S detect the order: if chi_U.f <= chi_U.g for all U in Lambda Y
    then f <= g.  Returns (holds, witness pair)."""
    objs = C.objects(bound)
    for X in objs:
        for Y in objs:
            lam = lambda_opens(Y, C)
            homs = C.morphisms(X, Y)
            for f in homs:
                for g in homs:
                    if all(f.preimage(U) & ~g.preimage(U) == 0 for U in lam):
                        if not all(Y.leq(a, b) for a, b in zip(f.values, g.values)):
                            return False, (f, g)
    return True, None


@dataclass
class ClosureReport:
    holds: bool
    checked: dict
    witness: tuple | None = None


def closure_under_weighted_limits_check(C: CategoryClass, bound: int) -> ClosureReport:
    """Products, inserters and cotensors (with weights of size <= 2) of
    C-objects of size <= bound stay in C with C-morphisms as projections."""
    objs = C.objects(bound)
    checked = {"product": 0, "inserter": 0, "cotensor": 0}
    for X in objs:
        for Y in objs:
            Pr, projs = product([X, Y])
            checked["product"] += 1
            if not C.is_object(Pr) or not all(C.is_morphism(p) for p in projs):
                return ClosureReport(False, checked, ("product", X, Y))
            homs = C.morphisms(X, Y)
            for f in homs:
                for g in homs:
                    I, incl = inserter(f, g)
                    checked["inserter"] += 1
                    if not C.is_object(I) or not C.is_morphism(incl):
                        return ClosureReport(False, checked, ("inserter", f, g))
        for W in posets_up_to(2, start=1):
            Ct, evals = cotensor(W, X)
            checked["cotensor"] += 1
            if not C.is_object(Ct) or not all(C.is_morphism(ev) for ev in evals.values()):
                return ClosureReport(False, checked, ("cotensor", W, X))
    return ClosureReport(True, checked)


# ---------------------------------------------------------------- colimits in Pos


def pos_coinserter(f: MonotoneMap, g: MonotoneMap) -> tuple[Poset, MonotoneMap]:
    """Universal q: Y -> Q with q.f <= q.g: Y modulo the preorder generated by
    its order and the pairs f(x) <= g(x)."""
    if f.dom != g.dom or f.cod != g.cod:
        raise PosetError("coinserter needs a parallel pair")
    Y = f.cod
    n = len(Y)
    reach = list(Y.up)
    for x in range(len(f.dom)):
        reach[f.values[x]] |= 1 << g.values[x]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            r = reach[i]
            for j in bits(r):
                r |= reach[j]
            if r != reach[i]:
                reach[i] = r
                changed = True
    classes = []
    cls_of = [None] * n
    for i in range(n):
        if cls_of[i] is None:
            members = to_mask(j for j in bits(reach[i]) if (reach[j] >> i) & 1)
            for j in bits(members):
                cls_of[j] = len(classes)
            classes.append(members)
    labels = [frozenset(Y.labels_of(c)) if len(list(bits(c))) > 1 else Y.elements[next(bits(c))] for c in classes]
    up = []
    for c in classes:
        rep = next(bits(c))
        up.append(to_mask(cls_of[j] for j in bits(reach[rep])))
    Q = Poset(labels, up)
    return Q, MonotoneMap(Y, Q, cls_of, check=False)


def pos_tensor(I: Poset, X: Poset) -> Poset:
    """I (x) X, the copower of X by I in Pos: the product I x X."""
    return product([I, X])[0]
