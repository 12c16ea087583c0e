"""Command-line front end: ``koszultor <command> --session FILE``.

Exit status is 0 for a determinate answer, 2 when a budget left the answer
undecided and 1 on errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import __version__
from .depthlab import depth_table, grade, grade_via_ext
from .groebner import BudgetExceeded, free_resolution
from .homalg import (
    IndeterminateError,
    PresentedModule,
    cocycle_module,
    ext,
    homology_at,
    koszul_cochain,
    tor,
    vanishes_at_prime,
)
from .ringcore import ParseError, SessionError, parse_session, serialize_session
from .torpairs import (
    FILTERS,
    PhiFunction,
    almost_cm_check,
    both_definable_check,
    class_membership,
    classify,
    cotilting_check,
    enumerate_phi,
    enumeration_size,
    generator_set,
    is_order_preserving,
    recover_phi,
    regular_dual,
    rfd,
    rfd_small_lower,
    sequence_view,
    tor_oracle_membership,
    validate_phi,
)

SCHEMA_VERSION = 1
COMMANDS = ("depth", "grade", "koszul", "tor", "ext", "classify", "membership", "verify",
            "recover", "enumerate", "rfd", "dual")


def session_digest(session) -> str:
    blob = json.dumps(serialize_session(session), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _num(value, path):
    """A number tagged with the computation that produced it."""
    if hasattr(value, "to_json"):
        value = value.to_json()
    return {"value": value, "path": path}


def _verdict(v):
    return {"holds": v.holds, "path": v.path, "witnesses": [list(w) for w in v.witnesses],
            **({"note": v.note} if v.note else {})}


def _module(session, name):
    if name in (None, "R"):
        return session.modules.get("R") or PresentedModule.free(session.ring)
    return session.module(name)


def _prime(session, name):
    try:
        return session.primes.entry(name)
    except KeyError:
        raise SessionError(f"unknown prime {name!r}") from None


def _phi(session, profile):
    if session.phi is None:
        raise SessionError("the session declares no phi")
    return validate_phi(PhiFunction.from_mapping(session.primes, session.phi), profile)


def _presentation(M):
    M = M.normalized()
    return {"zero": M.rank == 0, "generators": M.rank,
            "relations": [[str(f) for f in col] for col in M.relations.column_polys()]}


# ---------- commands ----------


def cmd_depth(session, args):
    prof = depth_table(session.primes, args.max_resolution_length)
    rows = []
    for name, d, g, h in prof.rows():
        rows.append({"prime": name, "depth": _num(d, "ext"), "grade": _num(g, "koszul"),
                     "height": None if h is None else _num(h, "dimension")})
    undecided = any(not d.is_determinate for _, d, _, _ in prof.rows())
    return {"profile": rows}, undecided


def cmd_grade(session, args):
    J = _prime(session, args.ideal)
    M = _module(session, args.module)
    by_koszul = grade(J, M)
    by_ext = grade_via_ext(J, M, args.max_resolution_length)
    return ({"ideal": J.name, "module": args.module or "R", "grade": _num(by_koszul, "koszul"),
             "grade_ext": _num(by_ext, "ext"), "agree": by_koszul == by_ext},
            not by_ext.is_determinate)


def cmd_koszul(session, args):
    J = _prime(session, args.ideal)
    M = _module(session, args.module)
    C = koszul_cochain(list(J.generators), M)
    out = []
    for i in range(len(C.terms)):
        H = homology_at(C, i)
        out.append({"degree": i, "zero": H.is_zero(),
                    "local": {e.name: not vanishes_at_prime(H, e) for e in session.primes}})
    return {"ideal": J.name, "module": args.module or "R", "path": "koszul", "cohomology": out}, False


def _homological(session, args, fn, path):
    M, N = _module(session, args.left), _module(session, args.right)
    G = fn(M, N, args.degree, args.max_resolution_length)
    return {"left": args.left, "right": args.right, "degree": args.degree, "path": path,
            "module": _presentation(G),
            "nonzero_at": [e.name for e in session.primes if not vanishes_at_prime(G, e)]}, False


def cmd_tor(session, args):
    return _homological(session, args, tor, "tor")


def cmd_ext(session, args):
    return _homological(session, args, ext, "ext")


def cmd_membership(session, args):
    prof = depth_table(session.primes, args.max_resolution_length)
    phi = _phi(session, prof)
    M = _module(session, args.module)
    a = class_membership(M, phi, args.shift, max_length=args.max_resolution_length)
    doc = {"module": args.module or "R", "shift": args.shift, "phi": phi.as_dict(), "depth_route": _verdict(a)}
    undecided = a.holds is None
    if args.shift == 0:
        b = tor_oracle_membership(M, phi, args.max_resolution_length)
        doc["tor_route"] = _verdict(b)
        undecided = undecided or b.holds is None
    return doc, undecided


def cmd_classify(session, args):
    prof = depth_table(session.primes, args.max_resolution_length)
    phi = _phi(session, prof)
    mods = dict(session.modules) or {"R": PresentedModule.free(session.ring)}
    rep = classify(mods, phi, prof, args.max_resolution_length)
    doc = {
        "phi": phi.as_dict(),
        "membership": {n: {"depth_route": _verdict(v), "tor_route": _verdict(rep.oracle[n])}
                       for n, v in rep.memberships.items()},
        "order_preserving": rep.order_preserving,
        "cotilting": _verdict(rep.cotilting),
        "both_definable": None if rep.both_definable is None else _verdict(rep.both_definable),
        "almost_cm": _verdict(rep.almost_cm),
        "dual": None if rep.dual is None else rep.dual.as_dict(),
        "chain": [list(x) for x in sequence_view(phi).chain],
        "generators": [{"prime": g.prime.name, "level": g.level, "localized": g.localized}
                       for g in generator_set(phi)],
        "note": "all statements are relative to the prime table",
    }
    undecided = any(v.holds is None for v in list(rep.memberships.values()) + list(rep.oracle.values()))
    return doc, undecided


def cmd_verify(session, args):
    prof = depth_table(session.primes, args.max_resolution_length)
    mods = dict(session.modules)
    mods.setdefault("R", PresentedModule.free(session.ring))
    oracle_checked = oracle_bad = oracle_undecided = 0
    trip_checked = trip_bad = 0
    failures = []
    for phi in enumerate_phi(prof, "none", args.allow_large_enumeration):
        for name, M in mods.items():
            a = class_membership(M, phi, max_length=args.max_resolution_length).holds
            b = tor_oracle_membership(M, phi, args.max_resolution_length).holds
            if a is None or b is None:
                oracle_undecided += 1
                continue
            oracle_checked += 1
            if a != b:
                oracle_bad += 1
                failures.append({"property": "main-oracle", "phi": phi.as_dict(), "module": name})
        back = recover_phi(generator_set(phi), session.primes, args.max_resolution_length)
        trip_checked += 1
        if back.values != phi.values:
            trip_bad += 1
            failures.append({"property": "round-trip", "phi": phi.as_dict(), "recovered": back.as_dict()})
    doc = {
        "main_oracle": {"pass": oracle_bad == 0, "checked": oracle_checked,
                        "indeterminate": oracle_undecided, "path": "ext vs tor-oracle"},
        "round_trip": {"pass": trip_bad == 0, "checked": trip_checked, "path": "tor-oracle"},
        "failures": failures,
    }
    if oracle_bad or trip_bad:
        raise VerificationFailed(doc)
    return doc, oracle_undecided > 0


class VerificationFailed(Exception):
    def __init__(self, doc):
        self.doc = doc
        super().__init__("verification failed")


def cmd_recover(session, args):
    if args.modules:
        gens = [_module(session, n) for n in args.modules]
        source = list(args.modules)
    else:
        prof = depth_table(session.primes, args.max_resolution_length)
        gens = generator_set(_phi(session, prof))
        source = [f"S_{g.level}({g.prime.name})" for g in gens]
    phi = recover_phi(gens, session.primes, args.max_resolution_length)
    return {"generators": source, "phi": {n: _num(v, "tor-oracle") for n, v in phi.items()}}, False


def cmd_enumerate(session, args):
    prof = depth_table(session.primes, args.max_resolution_length)
    phis = list(enumerate_phi(prof, args.filter, args.allow_large_enumeration))
    return {"filter": args.filter, "space": enumeration_size(prof), "count": len(phis),
            "functions": [p.as_dict() for p in phis], "path": "ext"}, False


def cmd_rfd(session, args):
    prof = depth_table(session.primes, args.max_resolution_length)
    M = _module(session, args.module)
    big = rfd(M, prof, args.max_resolution_length)
    tests = []
    R = PresentedModule.free(session.ring)
    for e in session.primes:
        d = prof.depth[e.name]
        for k in range(1, (d.value or 0) + 1):
            S = cocycle_module(e.ideal, R, k)
            if free_resolution(S, args.max_resolution_length).complete:
                tests.append(S)
    small = rfd_small_lower(M, tests, args.max_resolution_length)
    return {"module": args.module or "R", "Rfd": _num(big, "ext"), "rfd_lower": _num(small, "tor-oracle"),
            "test_modules": len(tests), "note": "suprema are taken over the prime table only"}, False


def cmd_dual(session, args):
    prof = depth_table(session.primes, args.max_resolution_length)
    phi = _phi(session, prof)
    psi = regular_dual(phi)
    return {"phi": phi.as_dict(), "dual": {n: _num(v, "dimension") for n, v in psi.items()},
            "order_preserving": is_order_preserving(psi),
            "both_definable": _verdict(both_definable_check(psi)),
            "cotilting": _verdict(cotilting_check(psi, prof)),
            "almost_cm": _verdict(almost_cm_check(prof))}, False


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# ---------- rendering ----------


def _render_text(doc, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(doc, dict):
        if set(doc) == {"value", "path"}:
            return [f"{pad}{_value_text(doc['value'])} [{doc['path']}]"]
        for k, v in doc.items():
            if isinstance(v, (dict, list)) and v and not (isinstance(v, dict) and set(v) == {"value", "path"}):
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(doc, list):
        for item in doc:
            if isinstance(item, (dict, list)):
                sub = _render_text(item, indent + 1)
                lines.append(f"{pad}-" + (" " + sub[0].strip() if sub else ""))
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{doc}")
    return lines


def _value_text(v):
    if isinstance(v, dict) and "at_least" in v:
        return f">={v['at_least']}"
    return v


def _scalar(v):
    if isinstance(v, dict) and set(v) == {"value", "path"}:
        return f"{_value_text(v['value'])} [{v['path']}]"
    return json.dumps(v) if isinstance(v, (dict, list)) else v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="koszultor", description="Depth, grade and Tor-pair computations over F_p[x]/I.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--session", required=True, help="session JSON file")
    common.add_argument("--format", choices=("text", "json"), default=None)
    common.add_argument("--max-resolution-length", type=int, default=None,
                        help="longest free resolution prefix to compute (default: variables + 4)")
    common.add_argument("--allow-large-enumeration", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("depth", parents=[common], help="depth, grade and height at every table prime")
    p = sub.add_parser("grade", parents=[common], help="grade of a table ideal on a module, both routes")
    p.add_argument("--ideal", required=True)
    p.add_argument("--module")
    p = sub.add_parser("koszul", parents=[common], help="Koszul cohomology of a table ideal")
    p.add_argument("--ideal", required=True)
    p.add_argument("--module")
    for name in ("tor", "ext"):
        p = sub.add_parser(name, parents=[common], help=f"{name.capitalize()} between two session modules")
        p.add_argument("--left", required=True)
        p.add_argument("--right", required=True)
        p.add_argument("--degree", type=int, required=True)
    sub.add_parser("classify", parents=[common], help="classify the session modules against phi")
    p = sub.add_parser("membership", parents=[common], help="membership of a module in the class of phi")
    p.add_argument("--module")
    p.add_argument("--shift", type=int, default=0)
    sub.add_parser("verify", parents=[common], help="main oracle and round trip over every valid phi")
    p = sub.add_parser("recover", parents=[common], help="recover phi from generators")
    p.add_argument("--modules", nargs="*", help="session modules to use as generators (default: the generators of phi)")
    p = sub.add_parser("enumerate", parents=[common], help="list the depth-bounded functions on the table")
    p.add_argument("--filter", choices=FILTERS, default="none")
    p = sub.add_parser("rfd", parents=[common], help="restricted flat dimension of a module")
    p.add_argument("--module")
    sub.add_parser("dual", parents=[common], help="height minus phi over a polynomial ring")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        with open(args.session, encoding="utf-8") as fh:
            session = parse_session(fh.read())
    except (OSError, ParseError, SessionError) as exc:
        print(f"error loading session: {exc}", file=stderr)
        return 1
    fmt = args.format or session.config.format
    if args.max_resolution_length is None:
        args.max_resolution_length = session.config.max_resolution_length
    start = time.perf_counter()
    status = 0
    try:
        result, undecided = HANDLERS[args.command](session, args)
        status = 2 if undecided else 0
    except VerificationFailed as exc:
        result, status = exc.doc, 1
    except (IndeterminateError, BudgetExceeded) as exc:
        result, status = {"indeterminate": True, "reason": str(exc)}, 2
    except (ValueError, KeyError) as exc:
        print(f"error in {args.command}: {exc}", file=stderr)
        return 1
    doc = {
        "tool": "koszultor",
        "version": __version__,
        "schema": SCHEMA_VERSION,
        "command": args.command,
        "session_digest": session_digest(session),
        "indeterminate": status == 2,
        "result": result,
    }
    if fmt == "json":
        stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        doc["seconds"] = round(time.perf_counter() - start, 3)
        stdout.write("\n".join(_render_text(doc)) + "\n")
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
