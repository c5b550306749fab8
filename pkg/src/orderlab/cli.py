"""Command-line front end: JSON in, certificates out.

Exit codes: 0 the property holds or the structure was found, 1 it fails or is
absent (a witness is included), 2 the input was rejected.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from importlib import resources

import jsonschema
from referencing import Registry, Resource

from . import algebras as alg
from . import domain, kleisli, sweeps
from .finspace import NotT0, SpaceError, space_from_json, specialization_poset
from .monads import MONAD_FACTORIES, NotInBase, SizeCapExceeded, get_monad, verify_kz, verify_monad_laws
from .poset import (
    CycleError,
    MonotoneMap,
    Poset,
    PosetError,
    canonical_form,
    label_str,
    lattices_up_to,
    make_poset,
    posets_up_to,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_MAX_ELEMENTS = 10
MONAD_NAMES = ["D", "I", "F", "F1", "F2", "Fc", "adjbounds"]


class InputError(Exception):
    pass


# ---------------------------------------------------------------- input


def _schema_registry() -> Registry:
    reg = Registry()
    for name in ("poset", "space", "map"):
        text = resources.files("orderlab.schemas").joinpath(f"{name}.schema.json").read_text()
        reg = reg.with_resource(f"orderlab/{name}.schema.json", Resource.from_contents(json.loads(text)))
    return reg


def validate(data, schema_name: str) -> None:
    reg = _schema_registry()
    schema = reg.contents(f"orderlab/{schema_name}.schema.json")
    v = jsonschema.Draft202012Validator(schema, registry=reg)
    e = jsonschema.exceptions.best_match(v.iter_errors(data))
    if e is not None:
        # descend into oneOf/anyOf branches so the pointer names the bad field
        while e.context:
            e = jsonschema.exceptions.best_match(e.context)
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise InputError(f"schema violation at {pointer}: {e.message}")


def max_elements() -> int:
    raw = os.environ.get("ORDERLAB_MAX_ELEMENTS", str(DEFAULT_MAX_ELEMENTS))
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"ORDERLAB_MAX_ELEMENTS must be an integer, got {raw!r}") from None


def _strs(xs):
    return [str(x) for x in xs]


def _poset_from(data) -> Poset:
    """Poset JSON, {"poset": ...}, or a space given by points and opens."""
    if "elements" in data:
        P = make_poset(_strs(data["elements"]), [tuple(_strs(p)) for p in data.get("le", [])])
    elif "poset" in data:
        return _poset_from(data["poset"])
    else:
        X = space_from_json({"points": _strs(data["points"]), "opens": [_strs(U) for U in data["opens"]]})
        P = specialization_poset(X)
    return P


def _check_size(P: Poset) -> Poset:
    cap = max_elements()
    if len(P) > cap:
        raise InputError(f"input has {len(P)} elements; ORDERLAB_MAX_ELEMENTS is {cap}")
    return P


def load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc.msg} at line {exc.lineno}") from None


def load_object(path: str) -> Poset:
    data = load_json(path)
    validate(data, "space")
    return _check_size(_poset_from(data))


def load_map(path: str) -> MonotoneMap:
    data = load_json(path)
    validate(data, "map")
    dom, cod = _check_size(_poset_from(data["dom"])), _check_size(_poset_from(data["cod"]))
    table = {str(k): str(v) for k, v in data["map"].items()}
    missing = [x for x in dom.elements if x not in table]
    if missing:
        raise InputError(f"schema violation at /map: no value for {missing[0]!r}")
    for k, v in table.items():
        if k not in dom:
            raise InputError(f"schema violation at /map/{k}: not an element of dom")
        if v not in cod:
            raise InputError(f"schema violation at /map/{k}: {v!r} is not an element of cod")
    f = MonotoneMap(dom, cod, [cod.index(table[x]) for x in dom.elements], check=False)
    w = f.monotonicity_witness()
    if w is not None:
        a, b = w
        raise InputError(f"map is not monotone: {label_str(dom.elements[a])} <= {label_str(dom.elements[b])}")
    return f


# ---------------------------------------------------------------- output


def _lab(x) -> str:
    return label_str(x)


def poset_json(P: Poset) -> dict:
    return P.to_json()


def map_table(f: MonotoneMap) -> dict:
    return {_lab(f.dom.elements[i]): _lab(f.cod.elements[v]) for i, v in enumerate(f.values)}


def certificate(verdict: str, law: str, instance, witness=None, details=None) -> dict:
    out = {"verdict": verdict, "law": law, "instance": instance}
    if witness is not None:
        out["witness"] = witness
    if details is not None:
        out["details"] = details
    return out


def _exit_for(verdict: str) -> int:
    return EXIT_OK if verdict == "pass" else EXIT_FAIL


def _text(cert: dict) -> str:
    lines = [f"{cert['law']}: {cert['verdict'].upper()}"]
    for key in ("summary", "details", "witness"):
        if key in cert and cert[key] not in (None, {}, []):
            lines.append(f"  {key}: {json.dumps(cert[key], sort_keys=True)}")
    rows = cert.get("rows")
    if rows:
        lines.append(f"  rows: {len(rows)}")
        for r in rows:
            lines.append("    " + ", ".join(f"{k}={v}" for k, v in r.items()))
    return "\n".join(lines)


def emit(cert: dict, fmt: str, started: float | None = None) -> None:
    if started is not None:
        cert["runtime_s"] = round(time.perf_counter() - started, 3)
    if fmt == "text":
        print(_text(cert))
    else:
        print(json.dumps(cert, indent=2, sort_keys=True, default=str))


# ---------------------------------------------------------------- check


CHECKS = list(domain.FLAGS) + ["t0", "sober"]


def cmd_check(args) -> dict:
    if args.predicate in ("t0", "sober"):
        # the loader already rejects non-T0 spaces; finite T0 spaces are sober
        P = load_object(args.file)
        return certificate("pass", f"check:{args.predicate}", poset_json(P))
    P = load_object(args.file)
    flags = domain.classify(P)
    ok = flags[args.predicate]
    witness = None if ok else domain.flag_witness(P, args.predicate)
    return certificate("pass" if ok else "fail", f"check:{args.predicate}", poset_json(P), witness, {"flags": flags})


# ---------------------------------------------------------------- monad


def _monad(name: str):
    try:
        return get_monad(name)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_monad(args) -> dict:
    T = _monad(args.name)
    P = load_object(args.file)
    inst = {"monad": T.name, "object": poset_json(P)}
    if args.action == "apply":
        return certificate("pass", "monad:apply", inst, details={"T_object": poset_json(T.obj(P))})
    if args.action == "unit":
        return certificate("pass", "monad:unit", inst, details={"unit": map_table(T.unit(P))})
    if args.action == "mult":
        return certificate("pass", "monad:mult", inst, details={"mult": map_table(T.mult(P))})
    if args.action == "kz-verify":
        r = verify_kz(T, P)
        verdict = "pass" if (r.cond_i and r.cond_ii and r.cond_iii) else "fail"
        return certificate(verdict, "monad:kz-verify", inst, None if verdict == "pass" else r.as_dict(), r.as_dict())
    if args.action == "laws":
        r = verify_monad_laws(T, P)
        wit = [{"law": law, "element": _lab(x)} for law, x in r.failures] or None
        return certificate("pass" if r.holds else "fail", "monad:laws", inst, wit, {"checked": r.checked, "skipped": r.skipped})
    raise InputError(f"unknown action {args.action!r}")


# ---------------------------------------------------------------- algebra


def cmd_algebra(args) -> dict:
    T = _monad(args.name)
    P = load_object(args.file)
    inst = {"monad": T.name, "object": poset_json(P)}
    A = alg.find_algebra_structure(T, P)
    if A is None:
        w = {"reason": "the unit has no adjoint satisfying the algebra laws"}
        return certificate("absent", f"algebra:{args.action}", inst, w)
    structure = map_table(A.structure)
    if args.action == "find":
        return certificate("pass", "algebra:find", inst, details={"structure": structure})
    if args.action == "split":
        S = alg.find_splitting(A)
        if S is None:
            return certificate("absent", "algebra:split", inst, {"reason": "the structure map has no further adjoint"}, {"structure": structure})
        verdict = "pass" if S.valid else "fail"
        return certificate(verdict, "algebra:split", inst, None if S.valid else S.checks, {"structure": structure, "splitting": map_table(S.t), "checks": S.checks})
    if args.action == "algebraic":
        try:
            c = alg.is_algebraic_char(A)
        except alg.NotSplit:
            return certificate("absent", "algebra:algebraic", inst, {"reason": "not split"}, {"structure": structure})
        details = {
            "structure": structure,
            "equaliser": sorted(_lab(x) for x in c.basis.elements),
            "dense": c.dense,
            "surjective": c.surjective,
            "epi_probe": c.epi_probe,
            "preserves_regular_mono": c.preserves_regular_mono,
        }
        return certificate("pass" if c.algebraic else "fail", "algebra:algebraic", inst, None if c.algebraic else details, details)
    if args.action == "algebraic-direct":
        hit = alg.is_algebraic_direct(T, A, args.max_size)
        if hit is None:
            return certificate("absent", "algebra:algebraic-direct", inst, {"reason": "no free algebra of matching size is isomorphic"}, {"structure": structure})
        Y, phi = hit
        return certificate("pass", "algebra:algebraic-direct", inst, details={"generator": poset_json(Y), "iso": map_table(phi)})
    raise InputError(f"unknown action {args.action!r}")


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> dict:
    try:
        res = sweeps.LAWS[args.law](args)
    except KeyError:
        raise InputError(f"unknown law {args.law!r}") from None
    out = res.to_json()
    out["instance"] = {"max_size": args.max_size, "class": args.cls}
    return out


# ---------------------------------------------------------------- search


_TOKENS = {"(", ")", "and", "or", "not", "->", "<->"}


_TOKEN_RE = re.compile(r"\s*(<->|->|\(|\)|[A-Za-z_][A-Za-z0-9_]*(?::[A-Za-z0-9_]+)?)")


def _tokenise(expr: str) -> list[str]:
    out, pos = [], 0
    expr = expr.rstrip()
    while pos < len(expr):
        m = _TOKEN_RE.match(expr, pos)
        if m is None:
            raise InputError(f"bad predicate: cannot read {expr[pos:].strip()!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_predicate(expr: str):
    """Tiny boolean language over atoms: flags from ``check`` and
    ``algebra:M``, ``split:M``, ``algebraic:M`` for a monad M.
    Precedence: not > and > or > -> > <->."""
    toks = _tokenise(expr)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected and tok != expected):
            raise InputError(f"bad predicate near token {pos}: expected {expected or 'a term'}")
        pos += 1
        return tok

    def atom():
        tok = peek()
        if tok == "(":
            take("(")
            e = iff()
            take(")")
            return e
        if tok == "not":
            take()
            e = atom()
            return ("not", e)
        tok = take()
        if tok in _TOKENS:
            raise InputError(f"bad predicate: unexpected {tok!r}")
        _check_atom(tok)
        return ("atom", tok)

    def conj():
        e = atom()
        while peek() == "and":
            take()
            e = ("and", e, atom())
        return e

    def disj():
        e = conj()
        while peek() == "or":
            take()
            e = ("or", e, conj())
        return e

    def implies():
        e = disj()
        if peek() == "->":
            take()
            e = ("->", e, implies())
        return e

    def iff():
        e = implies()
        while peek() == "<->":
            take()
            e = ("<->", e, implies())
        return e

    tree = iff()
    if peek() is not None:
        raise InputError(f"bad predicate: trailing {peek()!r}")
    return tree


def _check_atom(tok: str) -> None:
    if tok in domain.FLAGS:
        return
    if ":" in tok:
        kind, m = tok.split(":", 1)
        if kind in ("algebra", "split", "algebraic") and m in MONAD_FACTORIES:
            return
    raise InputError(f"unknown predicate atom {tok!r}")


def _atom_value(tok: str, P: Poset, cache: dict) -> bool:
    if tok in domain.FLAGS:
        if "flags" not in cache:
            cache["flags"] = domain.classify(P)
        return cache["flags"][tok]
    kind, m = tok.split(":", 1)
    T = get_monad(m)
    A = alg.find_algebra_structure(T, P)
    if kind == "algebra":
        return A is not None
    if A is None:
        return False
    if kind == "split":
        S = alg.find_splitting(A)
        return S is not None and S.valid
    return alg.is_algebraic(A)


def evaluate(tree, P: Poset, cache=None) -> bool:
    cache = {} if cache is None else cache
    op = tree[0]
    if op == "atom":
        return _atom_value(tree[1], P, cache)
    if op == "not":
        return not evaluate(tree[1], P, cache)
    a = evaluate(tree[1], P, cache)
    if op == "and":
        return a and evaluate(tree[2], P, cache)
    if op == "or":
        return a or evaluate(tree[2], P, cache)
    if op == "->":
        return (not a) or evaluate(tree[2], P, cache)
    return a == evaluate(tree[2], P, cache)


def cmd_search(args) -> dict:
    tree = parse_predicate(args.expr)
    gen = lattices_up_to(args.max_size) if args.lattices else posets_up_to(args.max_size)
    n = 0
    for P in gen:
        n += 1
        if not evaluate(tree, P):
            return certificate("fail", "search", {"expr": args.expr, "max_size": args.max_size}, {"counterexample": poset_json(P)}, {"checked": n})
    return certificate("pass", "search", {"expr": args.expr, "max_size": args.max_size}, details={"checked": n, "exhausted": True})


# ---------------------------------------------------------------- kar / kleisli


def cmd_kar(args) -> dict:
    T = _monad(args.name)
    reps = kleisli.enumerate_kar(T, args.max_size)
    rows = []
    for k in reps:
        sp = kleisli.split_kar(k)
        rows.append(
            {
                "carrier": poset_json(k.carrier),
                "t": map_table(k.t.map),
                "split_algebra_size": len(sp.algebra.carrier),
                "split_class": repr(canonical_form(sp.algebra.carrier)[1]),
            }
        )
    out = certificate("pass", "kar:enumerate", {"monad": T.name, "max_size": args.max_size}, details={"classes": len(rows)})
    out["rows"] = rows
    return out


def cmd_kleisli(args) -> dict:
    T = _monad(args.name)
    if args.action in ("dense", "mt"):
        f = load_map(args.file)
        inst = {"monad": T.name, "map": map_table(f)}
        if args.action == "dense":
            fs = kleisli.dense_adjoint(T, f)
            if fs is None:
                return certificate("fail", "kleisli:dense", inst, {"reason": "T f has no right adjoint"})
            return certificate("pass", "kleisli:dense", inst, details={"f_upper_star": map_table(fs.map)})
        ok = kleisli.in_M_T(T, f)
        details = {"dense": kleisli.is_T_dense(T, f), "order_mono": f.is_order_reflecting() and f.is_injective()}
        return certificate("pass" if ok else "fail", "kleisli:mt", inst, None if ok else details, details)
    if args.action == "cauchy":
        P = load_object(args.file)
        r = kleisli.is_cauchy_complete(T, P, args.probe)
        w = None if r.complete else {"arrow": map_table(r.witness.map)}
        return certificate("pass" if r.complete else "fail", "kleisli:cauchy", {"monad": T.name, "object": poset_json(P)}, w, {"left_adjoints": r.adjoints_seen})
    raise InputError(f"unknown action {args.action!r}")


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orderlab", description="Finite-instance workbench for Kock-Zoeberlein monads.")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--timing", action="store_true", help="add wall-clock runtime to the certificate")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="order-theoretic predicate on a poset or space")
    c.add_argument("predicate", choices=CHECKS)
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("monad", help="apply a monad or check its laws on one object")
    m.add_argument("name", choices=MONAD_NAMES)
    m.add_argument("action", choices=["apply", "unit", "mult", "kz-verify", "laws"])
    m.add_argument("file")
    m.set_defaults(func=cmd_monad)

    a = sub.add_parser("algebra", help="algebra structure, splitting, algebraicity")
    a.add_argument("name", choices=MONAD_NAMES)
    a.add_argument("action", choices=["find", "split", "algebraic", "algebraic-direct"])
    a.add_argument("file")
    a.add_argument("--max-size", type=int, default=None, help="generator size bound for algebraic-direct")
    a.set_defaults(func=cmd_algebra)

    v = sub.add_parser("verify", help="exhaustive sweep of one law family")
    v.add_argument("law", choices=sorted(sweeps.LAWS))
    v.add_argument("--max-size", type=int, default=None)
    v.add_argument("--class", dest="cls", choices=sorted(["alat", "adom", "spec"]), default=None)
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="first counterexample to a predicate expression")
    s.add_argument("expr")
    s.add_argument("--max-size", type=int, default=4)
    s.add_argument("--lattices", action="store_true", help="range over lattices only")
    s.set_defaults(func=cmd_search)

    k = sub.add_parser("kar", help="idempotents of the Kleisli category")
    k.add_argument("name", choices=MONAD_NAMES)
    k.add_argument("action", choices=["enumerate"])
    k.add_argument("--max-size", type=int, default=3)
    k.set_defaults(func=cmd_kar)

    kl = sub.add_parser("kleisli", help="T-density, M_T membership, Cauchy completeness")
    kl.add_argument("action", choices=["dense", "mt", "cauchy"])
    kl.add_argument("name", choices=MONAD_NAMES)
    kl.add_argument("file")
    kl.add_argument("--probe", type=int, default=3)
    kl.set_defaults(func=cmd_kleisli)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter() if args.timing else None
    try:
        cert = args.func(args)
    except (InputError, NotT0, SpaceError, CycleError, NotInBase, SizeCapExceeded, PosetError) as exc:
        err = {"verdict": "error", "error": str(exc)}
        if args.format == "text":
            print(f"error: {exc}", file=sys.stderr)
        else:
            print(json.dumps(err, indent=2, sort_keys=True))
        return EXIT_INPUT
    emit(cert, args.format, started)
    return _exit_for(cert["verdict"])


if __name__ == "__main__":
    sys.exit(main())
