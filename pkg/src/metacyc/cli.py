"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or schema error,
3 precision exhausted, 4 not admissible.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import admissible as adm
from .chainring import PrecisionError
from .groups import NotRealizableShape, Subgroup, check_params, classify_pair, make_g
from .lattices import (
    GammaParams,
    InvalidLattice,
    LatticeRep,
    NotFinite,
    PeClassVector,
    fingerprint,
    make_L1,
    make_L2,
    make_L3,
    omega_lattice,
    omega_vec,
    phi,
)
from .modules import LambdaModule
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION, EXIT_NOT_ADMISSIBLE = 0, 1, 2, 3, 4


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=int)
    sys.stdout.write("\n")


def _header(gp: GammaParams) -> dict:
    return {"p": gp.p, "r": gp.r, "s": gp.s, "k": gp.k}


def _load(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"invalid JSON ({exc})") from exc


def _int_matrix(obj, path: str, rows: int, cols: int | None = None) -> None:
    if not isinstance(obj, list) or len(obj) != rows:
        raise SchemaError(path, f"expected a list of {rows} rows")
    for i, row in enumerate(obj):
        if not isinstance(row, list) or (cols is not None and len(row) != cols):
            raise SchemaError(f"{path}[{i}]", f"expected a row of length {cols}")
        if not all(isinstance(x, int) for x in row):
            raise SchemaError(f"{path}[{i}]", "entries must be integers")


def validate_module_json(obj) -> None:
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected an object")
    for key in ("p", "r", "rank", "action"):
        if key not in obj:
            raise SchemaError(f"$.{key}", "missing")
    for key in ("p", "r", "rank"):
        if not isinstance(obj[key], int):
            raise SchemaError(f"$.{key}", "must be an integer")
    n = obj["rank"]
    if not isinstance(obj["action"], dict):
        raise SchemaError("$.action", "expected an object")
    for name, mat in obj["action"].items():
        if name not in ("sigma", "tau", "j"):
            raise SchemaError(f"$.action.{name}", "unknown generator")
        _int_matrix(mat, f"$.action.{name}", n, n)
    rel = obj.get("relations", [])
    if rel:
        _int_matrix(rel, "$.relations", n)
    if obj.get("group", "gamma") not in ("gamma", "g", "cr", "crxj"):
        raise SchemaError("$.group", "must be one of gamma, g, cr, crxj")


def load_module(path: str, k: int | None = None) -> LambdaModule:
    obj = _load(path)
    validate_module_json(obj)
    if k is not None:
        obj = {**obj, "k": k}
    try:
        return LambdaModule.from_json(obj)
    except ValueError as exc:
        raise SchemaError("$", str(exc)) from exc


def _gamma_params(M: LambdaModule) -> GammaParams:
    p, r, s = M.group.params
    return GammaParams(p, r, s, M.ctx.k)


def load_lattice(path: str, k: int | None = None) -> LatticeRep:
    M = load_module(path, k)
    if M.group.kind != "gamma":
        raise SchemaError("$.group", "a lattice over gamma is required")
    if not M.is_lattice:
        raise SchemaError("$.relations", "a lattice must have no nonzero relations")
    return LatticeRep.from_module(M)


def load_vector(obj, path: str = "$") -> PeClassVector:
    if not isinstance(obj, dict) or "a" not in obj or "b" not in obj:
        raise SchemaError(path, "expected an object with fields a and b")
    for key in ("a", "b"):
        if not isinstance(obj[key], list) or not all(isinstance(x, int) and x >= 0 for x in obj[key]):
            raise SchemaError(f"{path}.{key}", "expected a list of nonnegative integers")
    try:
        return PeClassVector.from_json(obj)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


# --- commands -------------------------------------------------------------------


def cmd_classify(args) -> int:
    gp = GammaParams(args.p, args.r, args.s, args.k)
    out, prints, ok = [], set(), True
    for i in range(gp.r):
        for name, mk in (("L1", make_L1), ("L2", make_L2), ("L3", make_L3)):
            L = mk(gp, i)
            fp = fingerprint(L)
            ok &= L.relations_hold()
            prints.add(fp)
            out.append({
                "name": f"{name}^{i}",
                "rank": L.rank,
                "sigma": L.sigma.tolist(),
                "tau": L.tau.tolist(),
                "fingerprint": fp.to_json(),
            })
    distinct = len(prints) == len(out)
    _emit({"params": _header(gp), "count": len(out), "distinct": distinct, "lattices": out})
    return EXIT_OK if ok and distinct else EXIT_FAIL


def cmd_fingerprint(args) -> int:
    L = load_lattice(args.file, args.k)
    _emit({"params": _header(L.params), **fingerprint(L).to_json()})
    return EXIT_OK


def cmd_phi(args) -> int:
    M = load_module(args.file, args.k)
    if M.group.kind != "gamma":
        raise SchemaError("$.group", "Φ needs a finite module over gamma")
    _emit({"params": _header(_gamma_params(M)), **phi(M).to_json()})
    return EXIT_OK


def cmd_omega(args) -> int:
    obj = _load(args.file)
    if isinstance(obj, dict) and "action" in obj:
        L = load_lattice(args.file, args.k)
        header = _header(L.params)
        for _ in range(args.times):
            L = omega_lattice(L)
        v = fingerprint(L).stripped()
    else:
        v = load_vector(obj)
        header = {"r": v.r}
        for _ in range(args.times):
            v = omega_vec(v)
    _emit({"params": header, **v.to_json()})
    return EXIT_OK


def cmd_adm(args) -> int:
    s = check_params(args.p, args.r, args.s)
    gens = adm.adm_generators(args.p, args.r)
    basis = adm.adm_basis(args.p, args.r)
    row = lambda g: {"kind": g.kind, "e": g.e, "name": g.name, "preshift": g.vector.to_json(), "shifted": omega_vec(g.vector).to_json()}
    _emit({
        "params": {"p": args.p, "r": args.r, "s": s},
        "rank": len(basis),
        "basis": [row(g) for g in basis],
        "generators": [row(g) for g in gens],
    })
    return EXIT_OK


def _load_pairs(path: str):
    obj = _load(path)
    items = obj.get("pairs") if isinstance(obj, dict) else obj
    if not isinstance(items, list) or not items:
        raise SchemaError("$", "expected a nonempty list of pairs")
    first = items[0].get("D", {}) if isinstance(items[0], dict) else {}
    try:
        G = make_g(first["p"], first["r"], first.get("s"))
    except KeyError as exc:
        raise SchemaError("$[0].D", f"missing {exc}") from exc
    pairs = []
    for n, item in enumerate(items):
        try:
            D = Subgroup.from_json(G, item["D"])
            I = Subgroup.from_json(G, item["I"])
        except KeyError as exc:
            raise SchemaError(f"$[{n}]", f"missing or invalid {exc}") from exc
        except ValueError as exc:
            raise SchemaError(f"$[{n}]", str(exc)) from exc
        pairs.append(classify_pair(G, D, I))
    return G, pairs


def cmd_predict(args) -> int:
    G, pairs = _load_pairs(args.file)
    pre, shifted = adm.predict(G, pairs)
    p, r, s = G.params
    try:
        dec = adm.adm_membership(pre, p).to_json()
    except adm.NotAdmissible as exc:
        dec = {"error": str(exc)}
    _emit({
        "params": {"p": p, "r": r, "s": s},
        "preshift": pre.to_json(),
        "shifted": shifted.to_json(),
        "decomposition": dec,
        "pairs": [{"case": pr.case, "d": pr.d, "e": pr.e, "reason": pr.reason} for pr in pairs],
    })
    return EXIT_OK


def cmd_realize(args) -> int:
    obj = _load(args.file)
    v = load_vector(obj)
    p = args.p if args.p is not None else obj.get("p")
    if p is None:
        raise SchemaError("$.p", "missing (or pass --p)")
    s = args.s if args.s is not None else obj.get("s")
    coords = args.coords or obj.get("coords", "preshift")
    s = check_params(p, v.r, s)
    try:
        dec, steps = adm.realize(v, p, s, coords)
    except adm.NotAdmissible as exc:
        _emit({"params": {"p": p, "r": v.r, "s": s}, "admissible": False, "reason": str(exc), "certificate": exc.certificate})
        return EXIT_NOT_ADMISSIBLE
    _emit({
        "params": {"p": p, "r": v.r, "s": s},
        "admissible": True,
        "decomposition": dec.to_json(),
        "pairs": [st.to_json() for st in steps],
    })
    return EXIT_OK


def cmd_verify(args) -> int:
    gp = GammaParams(args.p, args.r, args.s, args.k)
    t = time.perf_counter()
    results = run_suite(gp, args.suite, args.seed)
    failed = [c for c in results if not c.passed]
    _emit({
        "params": {**_header(gp), "suite": args.suite, "seed": args.seed},
        "checks": [c.to_json() for c in results],
        "passed": not failed,
    })
    print(f"verify: {len(results) - len(failed)}/{len(results)} checks passed in {time.perf_counter() - t:.1f}s", file=sys.stderr)
    if failed:
        print(f"first failing check: {failed[0].name} (criterion {failed[0].criterion})", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metacyc", description="Lattices and class-group predictions over Z_p[C_p ⋊ C_r].")
    sub = parser.add_subparsers(dest="command", required=True)

    def params(sp, k=True):
        sp.add_argument("--p", type=int, required=True, help="odd prime")
        sp.add_argument("--r", type=int, required=True, help="divisor of p - 1")
        sp.add_argument("--s", type=int, default=None, help="residue of exact order r (default: smallest)")
        if k:
            sp.add_argument("--k", type=int, default=6, help="working precision exponent")

    sp = sub.add_parser("classify", help="list the 3r indecomposable lattices with fingerprints")
    params(sp)
    sp.set_defaults(func=cmd_classify)

    for name, fn, text in (("fingerprint", cmd_fingerprint, "decompose a lattice"), ("phi", cmd_phi, "Φ of a finite module")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("file")
        sp.add_argument("--k", type=int, default=None, help="override the precision recorded in the file")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("omega", help="apply Ω to a lattice file or a class vector")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, default=None, help="override the precision recorded in the file")
    sp.add_argument("--times", type=int, default=1)
    sp.set_defaults(func=cmd_omega)

    sp = sub.add_parser("adm", help="the admissible basis")
    params(sp, k=False)
    sp.set_defaults(func=cmd_adm)

    sp = sub.add_parser("predict", help="class predicted by ramification pairs")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("realize", help="ramification plan for a class vector")
    sp.add_argument("file")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--s", type=int, default=None)
    sp.add_argument("--coords", choices=adm.COORDS, default=None)
    sp.set_defaults(func=cmd_realize)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    params(sp)
    sp.add_argument("--suite", choices=SUITES, default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, NotFinite) as exc:
        # at precision k a coordinate of exponent >= k is indistinguishable from a free one
        print(f"precision exhausted: {exc}; rerun with a larger --k", file=sys.stderr)
        return EXIT_PRECISION
    except (NotRealizableShape, InvalidLattice) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
