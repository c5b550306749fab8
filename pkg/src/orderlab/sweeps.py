"""Exhaustive sweeps over small instances, one per law family.

Each sweep returns a SweepResult whose rows are plain JSON-ready dicts in a
canonical order, so results do not depend on how work was sharded.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import algebras as alg
from . import domain, kleisli, weighted
from .monads import (
    FILTER_KINDS,
    OpenLattice,
    enumerate_filters,
    enumerate_filters_bruteforce,
    get_monad,
    verify_kz,
    verify_monad_laws,
)
from .poset import (
    are_isomorphic,
    bits,
    canonical_form,
    lattices_up_to,
    posets_up_to,
)


@dataclass
class SweepResult:
    law: str
    holds: bool
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {"law": self.law, "verdict": "pass" if self.holds else "fail", "summary": self.summary, "rows": self.rows}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def pmap(fn, items, jobs: int = 1) -> list:
    """Order-preserving map, optionally across worker processes."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def default_jobs() -> int:
    return min(4, os.cpu_count() or 1)


def _cf(P) -> str:
    """Short canonical description of an isomorphism class."""
    return repr(canonical_form(P)[1])


# ---------------------------------------------------------------- KZ


KZ_BOUNDS = {"D": 4, "I": 4, "F": 3, "F1": 3, "F2": 3, "Fc": 3, "adjbounds": 4}


def _kz_rows(args):
    name, bound = args
    T = get_monad(name)
    rows = []
    for X in T.base_objects(bound):
        r = verify_kz(T, X)
        laws = verify_monad_laws(T, X)
        rows.append(
            {
                "monad": name,
                "size": len(X),
                "object": _cf(X),
                **r.as_dict(),
                "agree": r.agree,
                "monad_laws": laws.holds,
                "assoc_skipped": bool(laws.skipped),
            }
        )
    return rows


def kz_equivalence(monads=None, bounds=None, jobs: int = 1) -> SweepResult:
    """The three KZ conditions agree; all true for the KZ monads, all false
    for the adjoin-bounds monad."""
    monads = list(monads or KZ_BOUNDS)
    bounds = {**KZ_BOUNDS, **(bounds or {})}
    chunks = pmap(_kz_rows, [(m, bounds[m]) for m in monads], jobs)
    rows = [r for c in chunks for r in c]
    holds, witness = True, None
    for r in rows:
        expect = r["monad"] != "adjbounds"
        vals = (r["cond_i"], r["cond_ii"], r["cond_iii"])
        if not r["agree"] or any(v != expect for v in vals) or not r["monad_laws"]:
            holds, witness = False, r
            break
    summary = {m: sum(1 for r in rows if r["monad"] == m) for m in monads}
    return SweepResult("kz-equiv", holds, rows, summary, witness)


# ---------------------------------------------------------------- EM by adjunction


EM_BOUNDS = {"D": 4, "I": 4, "F": 3, "F1": 3, "F2": 3, "Fc": 3}


def _em_rows(args):
    name, bound = args
    T = get_monad(name)
    out = []
    for X in T.base_objects(bound):
        table = alg.em_equivalence_table(T, X)
        div = [row for row in table if not (row[1] == row[2] == row[3])]
        out.append(
            {
                "monad": name,
                "object": _cf(X),
                "size": len(X),
                "candidates": len(table),
                "retractions": sum(r[1] for r in table),
                "adjoints": sum(r[2] for r in table),
                "algebras": sum(r[3] for r in table),
                "divergences": len(div),
            }
        )
    return out


def em_adjoint(monads=None, jobs: int = 1) -> SweepResult:
    monads = list(monads or EM_BOUNDS)
    rows = [r for c in pmap(_em_rows, [(m, EM_BOUNDS[m]) for m in monads], jobs) for r in c]
    bad = [r for r in rows if r["divergences"]]
    summary = {"candidates": sum(r["candidates"] for r in rows), "divergences": sum(r["divergences"] for r in rows)}
    return SweepResult("em-adjoint", not bad, rows, summary, bad[0] if bad else None)


# ---------------------------------------------------------------- filters


def filter_principality(max_size: int = 4) -> SweepResult:
    rows = []
    for X in posets_up_to(max_size):
        L = OpenLattice.of(X)
        fast = enumerate_filters(L)
        brute = enumerate_filters_bruteforce(X)
        fast_sets = sorted(sorted(L.opens[i] for i in bits(F)) for F in fast)
        brute_sets = sorted(sorted(F) for F in brute)
        principal = sorted(sorted(L.opens[i] for i in bits(L.principal(j))) for j in range(len(L)))
        rows.append(
            {
                "object": _cf(X),
                "size": len(X),
                "opens": len(L),
                "filters": len(fast),
                "filters_bruteforce": len(brute),
                "match": fast_sets == brute_sets == principal,
            }
        )
    bad = [r for r in rows if not (r["match"] and r["filters"] == r["opens"] == r["filters_bruteforce"])]
    return SweepResult("filter-principality", not bad, rows, {"spaces": len(rows)}, bad[0] if bad else None)


def prime_filters(max_size: int = 4) -> SweepResult:
    """Prime and completely prime filters coincide; F_c is idempotent and
    F_c X is isomorphic to X."""
    F, F2, Fc = get_monad("F"), get_monad("F2"), get_monad("Fc")
    rows = []
    for X in posets_up_to(max_size):
        L = F.open_lattice(X)
        same_flags = all(L.is_prime(f) == L.is_completely_prime(f) for f in F.filter_masks(X))
        same_carrier = F2.filter_masks(X) == Fc.filter_masks(X)
        e = Fc.unit(X)
        unit_iso = e.is_surjective() and e.is_injective() and e.is_order_reflecting()
        m = Fc.mult(X)
        mult_iso = m.is_surjective() and m.is_injective() and m.is_order_reflecting()
        rows.append(
            {
                "object": _cf(X),
                "size": len(X),
                "prime_eq_completely_prime": same_flags,
                "F2_eq_Fc": same_carrier,
                "unit_iso": unit_iso,
                "mult_iso": mult_iso,
                "Fc_iso_X": are_isomorphic(Fc.obj(X), X),
            }
        )
    bad = [r for r in rows if not all(v for k, v in r.items() if k not in ("object", "size"))]
    return SweepResult("prime-filters", not bad, rows, {"spaces": len(rows)}, bad[0] if bad else None)


# ---------------------------------------------------------------- filter-algebra splittings


def _split_row(A):
    r = domain.split_criteria_row(A)
    return {
        "lattice": _cf(A),
        "size": len(A),
        "split": r.split,
        "psi": r.psi,
        "coframe": r.coframe,
        "alpha_formula": r.alpha_formula,
        "compact_image": r.compact_image,
        "psi_failure": r.psi_failure,
        "agree": r.agree,
    }


def split_criteria(max_size: int = 6, jobs: int = 1) -> SweepResult:
    rows = pmap(_split_row, list(lattices_up_to(max_size)), jobs)
    bad = [r for r in rows if not r["agree"]]
    summary = {"lattices": len(rows), "split": sum(r["split"] for r in rows), "divergences": len(bad)}
    return SweepResult("thm6", not bad, rows, summary, bad[0] if bad else None)


# ---------------------------------------------------------------- algebraicity


def _char_row(L):
    T = get_monad("D")
    A = alg.find_algebra_structure(T, L)
    try:
        cert = alg.is_algebraic_char(A)
        char, basis = cert.algebraic, len(cert.basis)
    except alg.NotSplit:
        char, basis = False, None
    direct = alg.is_algebraic_direct(T, A) is not None
    birk = alg.birkhoff_reconstruction(L) is not None
    dist = domain.classify(L)["distributive"]
    return {
        "lattice": _cf(L),
        "size": len(L),
        "char": char,
        "direct": direct,
        "birkhoff": birk,
        "distributive": dist,
        "basis_size": basis,
        "agree": char == direct == birk == dist,
    }


def char_algebraic(max_size: int = 5, jobs: int = 1) -> SweepResult:
    rows = pmap(_char_row, list(lattices_up_to(max_size)), jobs)
    bad = [r for r in rows if not r["agree"]]
    return SweepResult("char-algebraic", not bad, rows, {"lattices": len(rows)}, bad[0] if bad else None)


# ---------------------------------------------------------------- kar


def kar_spl(name: str, size: int = 3) -> SweepResult:
    """Split algebras obtained from kar(X_T) and from the algebras directly
    give the same isomorphism classes (on carriers of size <= size)."""
    T = get_monad(name)
    reps = kleisli.enumerate_kar(T, size)
    from_kar = {}
    rows = []
    ok = True
    witness = None
    for k in reps:
        sp = kleisli.split_kar(k)
        good = sp.splitting is not None and sp.splitting.valid and sp.to_split is not None
        rows.append({"source": "kar", "carrier": len(k.carrier), "split_size": len(sp.algebra.carrier), "ok": good})
        if not good:
            ok, witness = False, witness or rows[-1]
        from_kar.setdefault(canonical_form(sp.algebra.carrier), sp.algebra.carrier)
    from_alg = {}
    for A in alg.enumerate_algebras(T, size):
        S = alg.find_splitting(A)
        if S is None:
            continue
        ko = kleisli.split_algebra_kar_object(S)
        sp = kleisli.split_kar(ko)
        back = alg.algebra_isomorphism(sp.algebra, A) is not None
        listed = any(kleisli.kar_isomorphic(ko, r) for r in reps)
        rows.append({"source": "algebra", "carrier": len(A.carrier), "round_trip": back, "listed": listed, "ok": back and listed})
        if not (back and listed):
            ok, witness = False, witness or rows[-1]
        from_alg[canonical_form(A.carrier)] = A.carrier
    small_kar = {c for c, Y in from_kar.items() if len(Y) <= size}
    same = small_kar == set(from_alg)
    summary = {
        "kar_classes": len(reps),
        "split_from_kar_small": len(small_kar),
        "split_algebras": len(from_alg),
        "classes_coincide": same,
    }
    return SweepResult(f"kar-spl:{name}", ok and same, rows, summary, witness)


# ---------------------------------------------------------------- Cauchy


def cauchy(probe_bound: int = 3) -> SweepResult:
    rows = []
    plan = [("D", 4), ("F", 3)]
    for name, bound in plan:
        T = get_monad(name)
        for Y in T.base_objects(bound):
            r = kleisli.is_cauchy_complete(T, Y, probe_bound)
            rows.append({"monad": name, "kind": "object", "size": len(Y), "object": _cf(Y), "complete": r.complete, "adjoints": r.adjoints_seen})
    for name in ("D", "I") + FILTER_KINDS:
        T = get_monad(name)
        for A in alg.enumerate_algebras(T, 3):
            r = kleisli.is_cauchy_complete(T, A.carrier, probe_bound)
            rows.append({"monad": name, "kind": "algebra", "size": len(A.carrier), "object": _cf(A.carrier), "complete": r.complete, "adjoints": r.adjoints_seen})
    # non-KZ contrast: reported, not part of the verdict
    T = get_monad("adjbounds")
    contrast = []
    for L in T.base_objects(3):
        for A in alg.algebra_structures_exhaustive(T, L):
            r = kleisli.is_cauchy_complete(T, A.carrier, probe_bound)
            contrast.append({"monad": "adjbounds", "kind": "contrast", "size": len(L), "object": _cf(L), "complete": r.complete, "adjoints": r.adjoints_seen})
    bad = [r for r in rows if not r["complete"]]
    summary = {"instances": len(rows), "contrast_incomplete": sum(not r["complete"] for r in contrast), "contrast": len(contrast)}
    return SweepResult("cauchy", not bad, rows + contrast, summary, bad[0] if bad else None)


# ---------------------------------------------------------------- injectivity / M_T


def injectivity(name: str, size: int = 3) -> SweepResult:
    T = get_monad(name)
    units = alg.unit_class(T, size)
    sample = kleisli.M_T_sample(T, size)
    rows = []
    for A in T.base_objects(size):
        row = {
            "monad": name,
            "size": len(A),
            "object": _cf(A),
            "algebra": alg.find_algebra_structure(T, A) is not None,
            "injective_units": alg.is_injective_wrt(A, units, T),
            "injective_MT": alg.is_injective_wrt(A, sample, T),
            "kan_injective_MT": all(alg.is_kan_injective(A, h, T.enrich) for h in sample),
        }
        row["agree"] = len({row["algebra"], row["injective_units"], row["injective_MT"], row["kan_injective_MT"]}) == 1
        rows.append(row)
    mt = kleisli.check_M_T_identity(T, size)
    bad = [r for r in rows if not r["agree"]]
    summary = {"objects": len(rows), "M_T_sample": len(sample), "mt_identity": mt.holds, "maps_checked": mt.checked}
    return SweepResult(f"injectivity:{name}", not bad and mt.holds, rows, summary, bad[0] if bad else None)


def mt_identity(names=("D", "I", "F", "F1", "F2"), size: int = 3) -> SweepResult:
    rows = []
    for name in names:
        r = kleisli.check_M_T_identity(get_monad(name), size)
        rows.append({"monad": name, "holds": r.holds, "checked": r.checked, "members": r.members})
    bad = [r for r in rows if not r["holds"]]
    return SweepResult("mt-identity", not bad, rows, {}, bad[0] if bad else None)


# ---------------------------------------------------------------- regular cogenerator


REGCOGEN_PLAN = {"alat": 4, "adom": 4, "spec": 4}


def _regcogen_rows(args):
    cname, max_size = args
    C = weighted.CLASSES[cname]
    rows = []
    for X in C.objects(max_size):
        if len(X) == 0:
            continue
        row = {"class": C.name, "size": len(X), "object": _cf(X)}
        try:
            cert = weighted.is_regular_cogenerator_instance(X, C)
            neg = weighted.is_regular_cogenerator_instance(X, C, weighted.corrupted_lambda(X, C))
            row.update(
                status="checked",
                equaliser=cert.equaliser,
                cone=cert.cone,
                control_fails=not neg.equaliser,
                **{f"n_{k}": v for k, v in cert.sizes.items()},
            )
        except weighted.CapExceeded as exc:
            row.update(status="capped", reason=str(exc))
        rows.append(row)
    return rows


def regcogen(classes=None, max_size: int | None = None, jobs: int = 1) -> SweepResult:
    classes = list(classes or REGCOGEN_PLAN)
    plan = [(c, max_size or REGCOGEN_PLAN[c]) for c in classes]
    rows = [r for c in pmap(_regcogen_rows, plan, jobs) for r in c]
    checked = [r for r in rows if r["status"] == "checked"]
    bad = [r for r in checked if not (r["equaliser"] and r["cone"] and r["control_fails"])]
    summary = {"checked": len(checked), "capped": len(rows) - len(checked)}
    return SweepResult("regcogen", not bad, rows, summary, bad[0] if bad else None)


LAWS = {
    "kz-equiv": lambda a: kz_equivalence(jobs=a.jobs, bounds={m: a.max_size for m in KZ_BOUNDS} if a.max_size else None),
    "em-adjoint": lambda a: em_adjoint(jobs=a.jobs),
    "injectivity": lambda a: _combine("injectivity", [injectivity(m, a.max_size or 3) for m in ("D", "I", "F")]),
    "cauchy": lambda a: cauchy(),
    "kar-spl": lambda a: _combine("kar-spl", [kar_spl(m, a.max_size or 3) for m in ("D", "F")]),
    "char-algebraic": lambda a: char_algebraic(a.max_size or 5, a.jobs),
    "thm6": lambda a: split_criteria(a.max_size or 6, a.jobs),
    "regcogen": lambda a: regcogen([a.cls] if a.cls else None, a.max_size, a.jobs),
    "mt-identity": lambda a: mt_identity(size=a.max_size or 3),
    "filter-principality": lambda a: filter_principality(a.max_size or 4),
    "prime-filters": lambda a: prime_filters(a.max_size or 4),
}


def _combine(law: str, parts: list) -> SweepResult:
    rows = [r for p in parts for r in p.rows]
    witness = next((p.witness for p in parts if not p.holds), None)
    return SweepResult(law, all(p.holds for p in parts), rows, {p.law: p.summary for p in parts}, witness)
